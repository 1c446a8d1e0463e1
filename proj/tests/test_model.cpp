#include <sstream>

#include "cellforge/model.hpp"
#include "doctest.h"

using namespace cellforge;

TEST_CASE("verify evaluates every constraint kind") {
  ConstraintModel m;
  int b0 = m.add_bool("b0");
  int b1 = m.add_bool("b1");
  int x = m.add_int(0, 10, "x");
  m.add_lin({{1, x}, {2, b0}}, Cmp::Ge, 3, "lower");
  m.add_impl(pos(b1), {{1, x}}, Cmp::Le, 5, "cap");
  m.add_card({pos(b0), pos(b1)}, 1, "amo");

  CHECK(m.verify({1, 0, 1}).empty());
  CHECK(m.verify({0, 1, 5}).empty());

  auto v1 = m.verify({0, 0, 2});  // lower violated
  REQUIRE(v1.size() == 1);
  CHECK(v1[0].constraint.find("lin:0") == 0);

  auto v2 = m.verify({0, 1, 7});  // implication violated
  REQUIRE(v2.size() == 1);
  CHECK(v2[0].constraint.find("impl:0") == 0);

  auto v3 = m.verify({1, 1, 3});  // cardinality violated
  REQUIRE(v3.size() == 1);
  CHECK(v3[0].constraint.find("card:0") == 0);

  CHECK_THROWS(m.verify({1, 0}));  // incomplete assignment

  ConstraintModel empty;
  CHECK(empty.verify({}).empty());
}

TEST_CASE("objective evaluation with offset") {
  ConstraintModel m;
  int x = m.add_int(0, 10, "x");
  int b = m.add_bool("b");
  m.set_objective({{3, x}, {-2, b}}, 7);
  CHECK(m.eval_objective({4, 1}) == 7 + 12 - 2);
}

TEST_CASE("well-formedness catches dangling variables") {
  ConstraintModel m;
  m.add_bool("b");
  m.add_lin({{1, 3}}, Cmp::Le, 1);
  CHECK(m.check_well_formed() == "lin:0");
}

TEST_CASE("text IR round trip") {
  ConstraintModel m;
  m.name = "demo";
  int b0 = m.add_bool("flow_a", 2, 0);
  int b1 = m.add_bool("flow_b", 2, 0);
  int x = m.add_int(-3, 12, "coord", 0);
  m.add_lin({{1, x}, {-4, b0}}, Cmp::Eq, 2, "chan");
  m.add_impl(neg(b1), {{1, x}}, Cmp::Ge, 1);
  m.add_card({pos(b0), neg(b1)}, 1);
  m.set_objective({{5, x}, {1, b0}}, -2);

  std::ostringstream os;
  m.emit(os);
  std::istringstream is(os.str());
  auto back = ConstraintModel::parse(is);

  CHECK(back.name == "demo");
  CHECK(back.var_count() == 3);
  CHECK(back.var(2).kind == VarKind::Int);
  CHECK(back.var(2).lb == -3);
  CHECK(back.var(2).ub == 12);
  CHECK(back.var(0).tier == 2);
  CHECK(back.lins().size() == 1);
  CHECK(back.impls().size() == 1);
  CHECK(back.cards().size() == 1);
  CHECK(back.impls()[0].cond.neg);
  CHECK(back.objective_offset() == -2);

  std::ostringstream os2;
  back.emit(os2);
  CHECK(os2.str() == os.str());

  // mutation detection survives the round trip
  CHECK(back.verify({1, 1, 6}).empty());
  CHECK(!back.verify({1, 1, 7}).empty());
}
