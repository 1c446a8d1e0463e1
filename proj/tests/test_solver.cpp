#include <random>
#include <sstream>

#include "cellforge/solver.hpp"
#include "doctest.h"

using namespace cellforge;

namespace {

SolveResult run(const ConstraintModel& m, int workers = 1, GapPolicy policy = {}) {
  SolveRequest req;
  req.model = &m;
  req.workers = workers;
  req.policy = policy;
  return solve(req);
}

// Exhaustive oracle: enumerate the full domain product.
struct Exhaustive {
  bool sat = false;
  long long best = 0;
};

Exhaustive enumerate(const ConstraintModel& m) {
  Exhaustive out;
  std::vector<long long> a(m.var_count());
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == m.var_count()) {
      if (m.verify(a).empty()) {
        long long obj = m.eval_objective(a);
        if (!out.sat || obj < out.best) {
          out.sat = true;
          out.best = obj;
        }
      }
      return;
    }
    for (long long v = m.var(static_cast<int>(i)).lb; v <= m.var(static_cast<int>(i)).ub; ++v) {
      a[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace

TEST_CASE("trivially satisfiable empty model") {
  ConstraintModel m;
  auto r = run(m);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.objective_bound == 0);
}

TEST_CASE("minimize x subject to x >= 3") {
  ConstraintModel m;
  int x = m.add_int(0, 10, "x");
  m.add_lin({{1, x}}, Cmp::Ge, 3);
  m.set_objective({{1, x}});
  auto r = run(m);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.objective_bound == 3);
  CHECK(r.lower_bound == 3);
  CHECK(r.assignment[x] == 3);
}

TEST_CASE("contradictory booleans are UNSAT") {
  ConstraintModel m;
  int b = m.add_bool("b");
  m.add_lin({{1, b}}, Cmp::Ge, 1);
  m.add_lin({{1, b}}, Cmp::Le, 0);
  auto r = run(m);
  CHECK(r.status == SolveStatus::Unsat);
  CHECK_FALSE(r.has_assignment());
}

TEST_CASE("malformed model rejected with the offending constraint id") {
  ConstraintModel m;
  m.add_bool("b");
  m.add_lin({{1, 9}}, Cmp::Le, 1);
  auto r = run(m);
  CHECK(r.error == "lin:0");
}

TEST_CASE("hints steer the first branch without changing the optimum") {
  ConstraintModel m;
  int x = m.add_int(0, 9, "x");
  int y = m.add_int(0, 9, "y");
  m.add_lin({{1, x}, {1, y}}, Cmp::Ge, 4);
  m.set_objective({{1, x}, {2, y}});
  SolveRequest req;
  req.model = &m;
  req.hints = {{x, 4}};
  auto r = solve(req);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.objective_bound == 4);
}

TEST_CASE("reference backend is exact on random small instances") {
  std::mt19937_64 rng(20260809);
  for (int iter = 0; iter < 120; ++iter) {
    ConstraintModel m;
    int nb = 3 + static_cast<int>(rng() % 5);
    int ni = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < nb; ++i) m.add_bool("b" + std::to_string(i));
    for (int i = 0; i < ni; ++i) {
      long long lb = static_cast<long long>(rng() % 3);
      m.add_int(lb, lb + 2 + static_cast<long long>(rng() % 3), "x" + std::to_string(i));
    }
    int nv = nb + ni;
    auto rand_terms = [&](int max_terms) {
      std::vector<LinTerm> ts;
      int k = 1 + static_cast<int>(rng() % max_terms);
      for (int i = 0; i < k; ++i) {
        ts.push_back({static_cast<long long>(rng() % 7) - 3, static_cast<int>(rng() % nv)});
      }
      return ts;
    };
    int nc = 2 + static_cast<int>(rng() % 5);
    for (int c = 0; c < nc; ++c) {
      int kind = static_cast<int>(rng() % 3);
      Cmp op = static_cast<Cmp>(rng() % 3);
      long long rhs = static_cast<long long>(rng() % 9) - 2;
      if (kind == 0) {
        m.add_lin(rand_terms(3), op, rhs);
      } else if (kind == 1) {
        m.add_impl({static_cast<int>(rng() % nb), rng() % 2 == 0}, rand_terms(2), op, rhs);
      } else {
        std::vector<Lit> lits;
        for (int i = 0; i < 3; ++i) lits.push_back({static_cast<int>(rng() % nb), rng() % 2 == 0});
        m.add_card(lits, 1 + static_cast<int>(rng() % 2));
      }
    }
    m.set_objective(rand_terms(4), static_cast<long long>(rng() % 5));

    auto expect = enumerate(m);
    auto got = run(m);
    if (expect.sat) {
      REQUIRE(got.status == SolveStatus::Optimal);
      CHECK(got.objective_bound == expect.best);
      CHECK(got.lower_bound == expect.best);
      CHECK(m.verify(got.assignment).empty());
    } else {
      CHECK(got.status == SolveStatus::Unsat);
    }
  }
}

TEST_CASE("traces are monotone") {
  // A model with several incumbents on the way down.
  ConstraintModel m;
  std::vector<int> xs;
  for (int i = 0; i < 6; ++i) xs.push_back(m.add_int(0, 3, "x" + std::to_string(i)));
  std::vector<LinTerm> sum;
  for (int x : xs) sum.push_back({1, x});
  m.add_lin(sum, Cmp::Ge, 7);
  std::vector<LinTerm> obj;
  for (size_t i = 0; i < xs.size(); ++i) obj.push_back({static_cast<long long>(i % 3 + 1), xs[i]});
  m.set_objective(obj);
  auto r = run(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  for (size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].lower_bound >= r.trace[i - 1].lower_bound);
    if (r.trace[i - 1].objective > 0) CHECK(r.trace[i].objective <= r.trace[i - 1].objective);
  }
  CHECK(r.trace.back().lower_bound == r.objective_bound);
}

TEST_CASE("multi-worker agrees with single worker on status and objective") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 10; ++iter) {
    ConstraintModel m;
    std::vector<int> xs;
    for (int i = 0; i < 8; ++i) xs.push_back(m.add_bool("b" + std::to_string(i)));
    for (int c = 0; c < 6; ++c) {
      std::vector<LinTerm> ts;
      for (int i = 0; i < 3; ++i) {
        ts.push_back({static_cast<long long>(rng() % 5) - 2, xs[rng() % xs.size()]});
      }
      m.add_lin(ts, static_cast<Cmp>(rng() % 3), static_cast<long long>(rng() % 5) - 2);
    }
    std::vector<LinTerm> obj;
    for (int x : xs) obj.push_back({static_cast<long long>(rng() % 4) - 1, x});
    m.set_objective(obj);

    auto r1 = run(m, 1);
    auto r4 = run(m, 4);
    CHECK(r1.status == r4.status);
    if (r1.status == SolveStatus::Optimal) CHECK(r1.objective_bound == r4.objective_bound);
  }
}

TEST_CASE("deterministic with one worker and a fixed seed") {
  ConstraintModel m;
  for (int i = 0; i < 10; ++i) m.add_bool("b" + std::to_string(i));
  std::vector<LinTerm> sum;
  for (int i = 0; i < 10; ++i) sum.push_back({1, i});
  m.add_lin(sum, Cmp::Ge, 4);
  m.set_objective(sum);
  auto a = run(m);
  auto b = run(m);
  CHECK(a.assignment == b.assignment);
  CHECK(a.stats.decisions == b.stats.decisions);
}

TEST_CASE("IR protocol round trip through the serve side") {
  ConstraintModel m;
  int x = m.add_int(0, 10, "x");
  int b = m.add_bool("b");
  m.add_lin({{1, x}, {5, b}}, Cmp::Ge, 8);
  m.set_objective({{1, x}, {1, b}});

  std::ostringstream ir;
  m.emit(ir);
  std::istringstream in(ir.str());
  std::ostringstream out;
  serve_ir(in, out, GapPolicy{}, 1, 1);

  std::istringstream reply(out.str());
  auto r = read_result(reply, m);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.objective_bound == 4);  // b=1, x=3
  CHECK(m.verify(r.assignment).empty());
}

TEST_CASE("gap policy arithmetic") {
  CHECK(relative_gap(201, 200) == doctest::Approx(1.0 / 201));
  CHECK(gap_reached({0.005, 1e18}, 201, 200));
  CHECK_FALSE(gap_reached({0.004, 1e18}, 201, 200));
  CHECK(gap_reached({0.0, 1e18}, 5010, 5010));
  CHECK(gap_reached({0.5, 1e18}, 0, -100));  // objective 0 counts as closed
}
