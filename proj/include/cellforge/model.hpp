#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "cellforge/geom.hpp"

namespace cellforge {

// Solver-neutral variable/constraint/objective intermediate representation.
// Everything the encoder produces lands here; the reference backend and the
// text-IR bridge both consume it.

enum class VarKind { Bool, Int };

struct Var {
  VarKind kind = VarKind::Bool;
  long long lb = 0;
  long long ub = 1;
  std::string name;
  // Branching tier for the reference backend: lower tiers are decided first
  // (placement -> cuts -> flows -> the rest).
  int tier = 5;
  // Preferred first value when branching (0 for flow/GV booleans).
  long long polarity = 0;
};

// Literal over a boolean var: var when neg == false, (1 - var) otherwise.
struct Lit {
  int var = -1;
  bool neg = false;
};
inline Lit pos(int v) { return {v, false}; }
inline Lit neg(int v) { return {v, true}; }

struct LinTerm {
  long long coef = 0;
  int var = -1;
};

enum class Cmp { Le, Ge, Eq };

struct LinCon {
  std::vector<LinTerm> terms;
  Cmp op = Cmp::Le;
  long long rhs = 0;
  std::string tag;
};

// Half-reified: cond == true implies the linear constraint holds.
struct ImplCon {
  Lit cond;
  LinCon lin;
};

// Sum of literals <= bound (bound == 1 gives at-most-one).
struct CardCon {
  std::vector<Lit> lits;
  int bound = 1;
  std::string tag;
};

struct Violation {
  std::string constraint;  // "lin:<i>", "impl:<i>", "card:<i>", tag appended
  std::string detail;
};

class ConstraintModel {
 public:
  int add_bool(const std::string& name, int tier = 5, long long polarity = 0);
  int add_int(long long lb, long long ub, const std::string& name, int tier = 5);

  // Convenience builders. Terms with coef 0 are dropped.
  int add_lin(std::vector<LinTerm> terms, Cmp op, long long rhs, std::string tag = "");
  int add_impl(Lit cond, std::vector<LinTerm> terms, Cmp op, long long rhs,
               std::string tag = "");
  int add_card(std::vector<Lit> lits, int bound, std::string tag = "");
  void add_at_most_one(std::vector<Lit> lits, std::string tag = "");

  // x <= y (+offset)
  void add_le(int x, int y, long long offset = 0, std::string tag = "");
  // b1 + b2 - 1 <= b3  (AND(b1,b2) forces b3)
  void add_and_implies(int b1, int b2, int b3, std::string tag = "");

  void set_objective(std::vector<LinTerm> terms, long long offset = 0);

  size_t var_count() const { return vars_.size(); }
  size_t bool_count() const;
  size_t int_count() const;
  const Var& var(int i) const { return vars_[i]; }
  Var& var(int i) { return vars_[i]; }

  const std::vector<Var>& vars() const { return vars_; }
  const std::vector<LinCon>& lins() const { return lins_; }
  const std::vector<ImplCon>& impls() const { return impls_; }
  const std::vector<CardCon>& cards() const { return cards_; }
  const std::vector<LinTerm>& objective() const { return obj_terms_; }
  long long objective_offset() const { return obj_offset_; }

  long long eval_objective(const std::vector<long long>& assignment) const;

  // Exact re-evaluation of every constraint; independent of any backend.
  // Throws std::invalid_argument on incomplete assignments.
  std::vector<Violation> verify(const std::vector<long long>& assignment) const;

  // Structural sanity (every referenced var declared, bounds ordered).
  // Returns the offending constraint id or empty string.
  std::string check_well_formed() const;

  // Text IR, one declaration/constraint per line.
  void emit(std::ostream& os) const;
  static ConstraintModel parse(std::istream& is);

  std::string name;

 private:
  std::vector<Var> vars_;
  std::vector<LinCon> lins_;
  std::vector<ImplCon> impls_;
  std::vector<CardCon> cards_;
  std::vector<LinTerm> obj_terms_;
  long long obj_offset_ = 0;
};

}  // namespace cellforge
