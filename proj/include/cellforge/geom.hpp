#pragma once

#include <cstdint>
#include <string>

namespace cellforge {

// All geometry is integer nanometers. Grid math (gcd, alignment, design-rule
// distances) must stay exact, so no floating point below this line.
using Nm = std::int64_t;

// Fixed layer roles for the default four-layer stack.
// L1 placement (vertical), L2 M0 (horizontal), L3 M1 (vertical),
// L4 M2 (horizontal). Code is written against indices so extra layers can be
// added, but nothing beyond four is exercised.
inline constexpr int kLayerPlace = 1;
inline constexpr int kLayerM0 = 2;
inline constexpr int kLayerM1 = 3;
inline constexpr int kLayerM2 = 4;
inline constexpr int kLayerCount = 4;

inline bool layer_is_horizontal(int layer) { return layer % 2 == 0; }
inline bool layer_is_vertical(int layer) { return layer % 2 == 1; }

// Squared Euclidean distance; avoids sqrt so rule thresholds compare exactly.
inline Nm dist2(Nm dx, Nm dy) { return dx * dx + dy * dy; }

std::string format_nm(Nm v);

}  // namespace cellforge
