#include "cellforge/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <cstdlib>

#include <unistd.h>

namespace cellforge {

namespace {
constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
}

double relative_gap(long long objective_bound, long long lower_bound) {
  if (objective_bound == 0) return 0.0;
  return std::abs(static_cast<double>(objective_bound) - static_cast<double>(lower_bound)) /
         std::abs(static_cast<double>(objective_bound));
}

bool gap_reached(const GapPolicy& policy, long long objective_bound, long long lower_bound) {
  return relative_gap(objective_bound, lower_bound) <= policy.relative_gap;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::FeasibleGap: return "FEASIBLE_GAP";
    case SolveStatus::Unsat: return "UNSAT";
    default: return "TIMEOUT";
  }
}

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

// State shared across search workers: best incumbent (atomic min), best
// lower bound (atomic max), stop flag.
struct Shared {
  std::atomic<long long> best_obj{kInf};
  std::atomic<long long> best_lb{-kInf};
  std::atomic<bool> stop{false};
  std::atomic<int> complete_status{-1};
  std::mutex mu;
  std::vector<long long> best_assignment;

  void offer_incumbent(long long obj, const std::vector<long long>& a) {
    std::lock_guard<std::mutex> lock(mu);
    if (obj < best_obj.load()) {
      best_obj.store(obj);
      best_assignment = a;
    }
  }
  void raise_lb(long long lb) {
    long long cur = best_lb.load();
    while (lb > cur && !best_lb.compare_exchange_weak(cur, lb)) {
    }
  }
};

struct Occurrence {
  enum Kind { Lin, Impl, Card } kind;
  int index;
};

class Engine {
 public:
  Engine(const ConstraintModel& m, const SolveRequest& req, Shared& shared, int worker_id)
      : m_(m), req_(req), shared_(shared), worker_(worker_id),
        rng_(req.seed * 7919 + static_cast<std::uint64_t>(worker_id) * 104729) {
    size_t n = m_.var_count();
    lo_.resize(n);
    hi_.resize(n);
    for (size_t i = 0; i < n; ++i) {
      lo_[i] = m_.var(static_cast<int>(i)).lb;
      hi_[i] = m_.var(static_cast<int>(i)).ub;
    }
    occ_.resize(n);
    for (size_t c = 0; c < m_.lins().size(); ++c) {
      for (const auto& t : m_.lins()[c].terms) occ_[t.var].push_back({Occurrence::Lin, (int)c});
    }
    for (size_t c = 0; c < m_.impls().size(); ++c) {
      occ_[m_.impls()[c].cond.var].push_back({Occurrence::Impl, (int)c});
      for (const auto& t : m_.impls()[c].lin.terms) {
        occ_[t.var].push_back({Occurrence::Impl, (int)c});
      }
    }
    for (size_t c = 0; c < m_.cards().size(); ++c) {
      for (const auto& l : m_.cards()[c].lits) occ_[l.var].push_back({Occurrence::Card, (int)c});
    }
    occ_count_.resize(n, 0);
    for (size_t i = 0; i < n; ++i) occ_count_[i] = occ_[i].size();
    score_.resize(n, 0);
    std::map<int, std::vector<int>> tiers;
    for (size_t i = 0; i < n; ++i) {
      if (lo_[i] != hi_[i]) tiers[m_.var(static_cast<int>(i)).tier].push_back(static_cast<int>(i));
    }
    for (auto& [t, vs] : tiers) tier_vars_.push_back(std::move(vs));
    tier_unfixed_.resize(tier_vars_.size());
    var_tier_slot_.assign(n, -1);
    for (size_t t = 0; t < tier_vars_.size(); ++t) {
      tier_unfixed_[t] = tier_vars_[t].size();
      for (int v : tier_vars_[t]) var_tier_slot_[v] = static_cast<int>(t);
    }
    in_queue_lin_.assign(m_.lins().size(), false);
    in_queue_impl_.assign(m_.impls().size(), false);
    in_queue_card_.assign(m_.cards().size(), false);
  }

  SolveResult run() {
    start_ = std::chrono::steady_clock::now();
    SolveResult res;

    if (!propagate_all()) {
      res.status = SolveStatus::Unsat;
      shared_.complete_status.store(static_cast<int>(SolveStatus::Unsat));
      shared_.stop.store(true);
      finalize(res);
      return res;
    }
    root_lb_ = objective_lb();
    search();

    long long best = shared_.best_obj.load();
    bool have = best < kInf;
    if (stopped_ == StopReason::None) {
      // Search space exhausted: either proved optimal or unsat.
      res.status = have ? SolveStatus::Optimal : SolveStatus::Unsat;
      if (have) shared_.raise_lb(best);
      shared_.complete_status.store(static_cast<int>(res.status));
      shared_.stop.store(true);
    } else if (stopped_ == StopReason::Gap) {
      res.status = SolveStatus::FeasibleGap;
    } else if (stopped_ == StopReason::Time) {
      res.status = SolveStatus::Timeout;
    } else {
      int st = shared_.complete_status.load();
      res.status = st >= 0 ? static_cast<SolveStatus>(st)
                           : (have ? SolveStatus::FeasibleGap : SolveStatus::Timeout);
    }
    finalize(res);
    return res;
  }

 private:
  enum class StopReason { None, Gap, Time, Peer };

  struct SpineNode {
    int var;
    long long split;  // first branch x<=split (low_first) or x>=split+1
    bool low_first;
    bool second_tried;
    long long entry_lb;
    size_t trail_mark;
  };

  void finalize(SolveResult& res) {
    {
      std::lock_guard<std::mutex> lock(shared_.mu);
      res.assignment = shared_.best_assignment;
    }
    long long best = shared_.best_obj.load();
    res.objective_bound = best < kInf ? best : 0;
    if (res.status == SolveStatus::Optimal) {
      res.lower_bound = res.objective_bound;
    } else if (res.status == SolveStatus::Unsat) {
      res.objective_bound = 0;
      res.lower_bound = 0;
      res.assignment.clear();
    } else {
      res.lower_bound = std::max(shared_.best_lb.load(), root_lb_);
      if (res.has_assignment()) res.lower_bound = std::min(res.lower_bound, res.objective_bound);
    }
    res.stats = stats_;
    res.stats.wall_s = elapsed();
    res.rlbt_fired = rlbt_fired_;
    res.first_incumbent_node_lb = first_lb_ == -kInf ? 0 : first_lb_;
    res.first_incumbent_rlbt_lb = first_rlbt_lb_;
    if (trace_.empty() || trace_.back().objective != res.objective_bound ||
        trace_.back().lower_bound != res.lower_bound) {
      trace_.push_back({stats_.decisions, elapsed(), res.objective_bound, res.lower_bound});
    }
    res.trace = trace_;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool fixed(int v) const { return lo_[v] == hi_[v]; }

  bool set_lo(int v, long long val) {
    if (val <= lo_[v]) return true;
    if (val > hi_[v]) return false;
    trail_.push_back({v, lo_[v], hi_[v]});
    lo_[v] = val;
    if (lo_[v] == hi_[v] && var_tier_slot_[v] >= 0) --tier_unfixed_[var_tier_slot_[v]];
    touch(v);
    return true;
  }

  bool set_hi(int v, long long val) {
    if (val >= hi_[v]) return true;
    if (val < lo_[v]) return false;
    trail_.push_back({v, lo_[v], hi_[v]});
    hi_[v] = val;
    if (lo_[v] == hi_[v] && var_tier_slot_[v] >= 0) --tier_unfixed_[var_tier_slot_[v]];
    touch(v);
    return true;
  }

  void rewind(size_t mark) {
    while (trail_.size() > mark) {
      const auto& t = trail_.back();
      if (lo_[t.var] == hi_[t.var] && var_tier_slot_[t.var] >= 0) {
        ++tier_unfixed_[var_tier_slot_[t.var]];
      }
      lo_[t.var] = t.lo;
      hi_[t.var] = t.hi;
      trail_.pop_back();
    }
  }

  void touch(int v) {
    for (const auto& o : occ_[v]) {
      char* flag = nullptr;
      switch (o.kind) {
        case Occurrence::Lin: flag = &in_queue_lin_[o.index]; break;
        case Occurrence::Impl: flag = &in_queue_impl_[o.index]; break;
        case Occurrence::Card: flag = &in_queue_card_[o.index]; break;
      }
      if (!*flag) {
        *flag = 1;
        queue_.push_back(o);
      }
    }
  }

  long long min_act(const std::vector<LinTerm>& terms) const {
    long long v = 0;
    for (const auto& t : terms) v += t.coef > 0 ? t.coef * lo_[t.var] : t.coef * hi_[t.var];
    return v;
  }
  long long max_act(const std::vector<LinTerm>& terms) const {
    long long v = 0;
    for (const auto& t : terms) v += t.coef > 0 ? t.coef * hi_[t.var] : t.coef * lo_[t.var];
    return v;
  }

  bool prop_le(const std::vector<LinTerm>& terms, long long rhs) {
    long long ma = min_act(terms);
    if (ma > rhs) return false;
    long long slack = rhs - ma;
    for (const auto& t : terms) {
      if (t.coef > 0) {
        long long bound = lo_[t.var] + floor_div(slack, t.coef);
        if (bound < hi_[t.var] && !set_hi(t.var, bound)) return false;
      } else {
        long long bound = hi_[t.var] + ceil_div(-slack, -t.coef);
        if (bound > lo_[t.var] && !set_lo(t.var, bound)) return false;
      }
    }
    return true;
  }

  bool prop_lin(const LinCon& c) {
    switch (c.op) {
      case Cmp::Le:
        return prop_le(c.terms, c.rhs);
      case Cmp::Ge: {
        neg_buf_.clear();
        for (const auto& t : c.terms) neg_buf_.push_back({-t.coef, t.var});
        return prop_le(neg_buf_, -c.rhs);
      }
      default: {
        if (!prop_le(c.terms, c.rhs)) return false;
        neg_buf_.clear();
        for (const auto& t : c.terms) neg_buf_.push_back({-t.coef, t.var});
        return prop_le(neg_buf_, -c.rhs);
      }
    }
  }

  bool lin_possible(const LinCon& c) const {
    switch (c.op) {
      case Cmp::Le: return min_act(c.terms) <= c.rhs;
      case Cmp::Ge: return max_act(c.terms) >= c.rhs;
      default: return min_act(c.terms) <= c.rhs && max_act(c.terms) >= c.rhs;
    }
  }

  bool lit_is_true(const Lit& l) const { return l.neg ? hi_[l.var] == 0 : lo_[l.var] == 1; }
  bool lit_is_false(const Lit& l) const { return l.neg ? lo_[l.var] == 1 : hi_[l.var] == 0; }
  bool fix_lit_false(const Lit& l) { return l.neg ? set_lo(l.var, 1) : set_hi(l.var, 0); }

  bool prop_impl(const ImplCon& c) {
    if (lit_is_true(c.cond)) return prop_lin(c.lin);
    if (lit_is_false(c.cond)) return true;
    if (!lin_possible(c.lin)) return fix_lit_false(c.cond);
    return true;
  }

  bool prop_card(const CardCon& c) {
    int true_count = 0;
    int unfixed = 0;
    for (const auto& l : c.lits) {
      if (lit_is_true(l)) ++true_count;
      else if (!lit_is_false(l)) ++unfixed;
    }
    if (true_count > c.bound) return false;
    if (true_count == c.bound && unfixed > 0) {
      for (const auto& l : c.lits) {
        if (!lit_is_true(l) && !lit_is_false(l) && !fix_lit_false(l)) return false;
      }
    }
    return true;
  }

  void drain_queue() {
    for (const auto& oc : queue_) {
      switch (oc.kind) {
        case Occurrence::Lin: in_queue_lin_[oc.index] = false; break;
        case Occurrence::Impl: in_queue_impl_[oc.index] = false; break;
        case Occurrence::Card: in_queue_card_[oc.index] = false; break;
      }
    }
    queue_.clear();
  }

  bool propagate() {
    while (!queue_.empty()) {
      Occurrence o = queue_.back();
      queue_.pop_back();
      ++stats_.propagations;
      bool ok = true;
      switch (o.kind) {
        case Occurrence::Lin:
          in_queue_lin_[o.index] = false;
          ok = prop_lin(m_.lins()[o.index]);
          break;
        case Occurrence::Impl:
          in_queue_impl_[o.index] = false;
          ok = prop_impl(m_.impls()[o.index]);
          break;
        case Occurrence::Card:
          in_queue_card_[o.index] = false;
          ok = prop_card(m_.cards()[o.index]);
          break;
      }
      if (!ok) {
        bump_conflict(o);
        drain_queue();
        ++stats_.conflicts;
        if ((stats_.conflicts & 0xfff) == 0) {
          for (auto& w : score_) w >>= 1;  // decay
        }
        return false;
      }
    }
    return true;
  }

  // conflict-weighted degree: focus branching near recent contention
  void bump_conflict(const Occurrence& o) {
    switch (o.kind) {
      case Occurrence::Lin:
        for (const auto& t : m_.lins()[o.index].terms) score_[t.var] += 16;
        break;
      case Occurrence::Impl:
        score_[m_.impls()[o.index].cond.var] += 16;
        for (const auto& t : m_.impls()[o.index].lin.terms) score_[t.var] += 16;
        break;
      case Occurrence::Card:
        for (const auto& l : m_.cards()[o.index].lits) score_[l.var] += 16;
        break;
    }
  }

  bool propagate_all() {
    for (size_t c = 0; c < m_.lins().size(); ++c) {
      in_queue_lin_[c] = true;
      queue_.push_back({Occurrence::Lin, (int)c});
    }
    for (size_t c = 0; c < m_.impls().size(); ++c) {
      in_queue_impl_[c] = true;
      queue_.push_back({Occurrence::Impl, (int)c});
    }
    for (size_t c = 0; c < m_.cards().size(); ++c) {
      in_queue_card_[c] = true;
      queue_.push_back({Occurrence::Card, (int)c});
    }
    return propagate();
  }

  long long objective_lb() const {
    long long v = m_.objective_offset();
    for (const auto& t : m_.objective()) {
      v += t.coef > 0 ? t.coef * lo_[t.var] : t.coef * hi_[t.var];
    }
    return v;
  }

  long long node_lb(bool* rlbt_used, long long* rlbt_value) {
    long long lb = objective_lb();
    if (rlbt_used) *rlbt_used = false;
    if (req_.subtree_bound) {
      bool ready = true;
      for (int v : req_.subtree_bound->trigger_vars) {
        if (!fixed(v)) {
          ready = false;
          break;
        }
      }
      if (ready) {
        long long h = req_.subtree_bound->eval(lo_, hi_);
        if (rlbt_used) *rlbt_used = true;
        if (rlbt_value) *rlbt_value = h;
        lb = std::max(lb, h);
      }
    }
    return lb;
  }

  int pick_var() const {
    for (size_t t = 0; t < tier_vars_.size(); ++t) {
      if (tier_unfixed_[t] == 0) continue;
      int best = -1;
      std::tuple<long long, long long, long long> best_key{0, 0, 0};
      for (int v : tier_vars_[t]) {
        if (fixed(v)) continue;
        std::tuple<long long, long long, long long> key{
            -score_[v], hi_[v] - lo_[v], -static_cast<long long>(occ_count_[v])};
        if (best < 0 || key < best_key) {
          best = v;
          best_key = key;
        }
      }
      if (best >= 0) return best;
    }
    return -1;
  }

  long long frontier_lb(long long current) const {
    long long lb = current;
    for (const auto& n : spine_) {
      if (!n.second_tried) lb = std::min(lb, n.entry_lb);
    }
    return lb;
  }

  void publish_lb(long long current) {
    long long fl = frontier_lb(current);
    long long best = shared_.best_obj.load();
    if (best < kInf) fl = std::min(fl, best);
    shared_.raise_lb(fl);
  }

  void record_trace(long long lb_candidate) {
    long long best = shared_.best_obj.load();
    TracePoint p;
    p.step = stats_.decisions;
    p.wall_s = elapsed();
    p.objective = best < kInf ? best : 0;
    p.lower_bound = std::max(shared_.best_lb.load(), std::min(lb_candidate, p.objective));
    if (!trace_.empty()) {
      p.lower_bound = std::max(p.lower_bound, trace_.back().lower_bound);
      if (p.objective == trace_.back().objective && p.lower_bound == trace_.back().lower_bound) {
        return;
      }
    }
    trace_.push_back(p);
  }

  void debug_dump() const {
    fprintf(stderr, "spine depth=%zu decisions=%lld conflicts=%lld\n", spine_.size(),
            stats_.decisions, stats_.conflicts);
    std::map<int, int> per_tier;
    for (const auto& n : spine_) per_tier[m_.var(n.var).tier]++;
    for (const auto& [t, k] : per_tier) fprintf(stderr, "  tier %d: %d decisions\n", t, k);
    for (size_t i = 0; i < spine_.size() && i < 60; ++i) {
      const auto& n = spine_[i];
      fprintf(stderr, "  [%zu] %s split=%lld low_first=%d second=%d lb=%lld\n", i,
              m_.var(n.var).name.c_str(), n.split, n.low_first, n.second_tried, n.entry_lb);
    }
  }

  bool should_stop() {
    if (shared_.stop.load()) {
      stopped_ = StopReason::Peer;
      return true;
    }
    if (elapsed() > req_.policy.time_limit_s) {
      stopped_ = StopReason::Time;
      shared_.stop.store(true);
      if (getenv("CELLFORGE_DEBUG_SPINE")) debug_dump();
      return true;
    }
    long long best = shared_.best_obj.load();
    if (best < kInf && req_.policy.relative_gap > 0) {
      if (gap_reached(req_.policy, best, shared_.best_lb.load())) {
        stopped_ = StopReason::Gap;
        shared_.stop.store(true);
        return true;
      }
    }
    return false;
  }

  // Backtrack to the deepest spine node with an untried branch and move into
  // it. Returns false when the search space is exhausted.
  bool advance() {
    while (!spine_.empty()) {
      SpineNode& n = spine_.back();
      if (n.second_tried) {
        rewind(n.trail_mark);
        spine_.pop_back();
        continue;
      }
      n.second_tried = true;
      rewind(n.trail_mark);
      ++stats_.decisions;
      bool ok = n.low_first ? set_lo(n.var, n.split + 1) : set_hi(n.var, n.split);
      if (ok && propagate()) return true;
      rewind(n.trail_mark);
      spine_.pop_back();
    }
    return false;
  }

  void search() {
    while (true) {
      bool rlbt = false;
      long long rlbt_val = 0;
      long long lb = node_lb(&rlbt, &rlbt_val);
      long long best = shared_.best_obj.load();

      if ((stats_.decisions & 0x3f) == 0) {
        if (worker_ == 0) publish_lb(lb);
        if (should_stop()) return;
      }

      if (best < kInf && lb >= best) {
        if (!advance()) return;
        continue;
      }

      int v = pick_var();
      if (v < 0) {
        // Full assignment at a propagation fixpoint: feasible incumbent.
        long long obj = objective_lb();
        if (obj < best) {
          std::vector<long long> a(lo_.begin(), lo_.end());
          shared_.offer_incumbent(obj, a);
          if (first_lb_ == -kInf) {
            first_lb_ = lb;
            rlbt_fired_ = rlbt;
            first_rlbt_lb_ = rlbt ? rlbt_val : 0;
          }
          if (worker_ == 0) {
            publish_lb(lb);
            record_trace(frontier_lb(lb));
          }
        }
        if (!advance()) return;
        continue;
      }

      SpineNode n;
      n.var = v;
      n.entry_lb = lb;
      n.trail_mark = trail_.size();
      n.second_tried = false;
      auto hint = req_.hints.find(v);
      if (hint != req_.hints.end() && hint->second >= lo_[v] && hint->second <= hi_[v]) {
        if (hint->second < hi_[v]) {
          n.split = hint->second;
          n.low_first = true;
        } else {
          n.split = hi_[v] - 1;
          n.low_first = false;
        }
      } else if (m_.var(v).kind == VarKind::Bool) {
        long long pol = m_.var(v).polarity;
        if (worker_ > 0 && (rng_() & 7) == 0) pol = 1 - pol;
        n.split = 0;
        n.low_first = pol == 0;
      } else {
        long long pol = std::clamp(m_.var(v).polarity, lo_[v], hi_[v] - 1);
        n.split = pol;
        n.low_first = true;
      }
      ++stats_.decisions;
      bool ok = n.low_first ? set_hi(v, n.split) : set_lo(v, n.split + 1);
      spine_.push_back(n);
      if (!ok || !propagate()) {
        if (!advance()) return;
      }
    }
  }

  const ConstraintModel& m_;
  const SolveRequest& req_;
  Shared& shared_;
  int worker_;
  std::mt19937_64 rng_;

  std::vector<long long> lo_, hi_;
  struct TrailEntry {
    int var;
    long long lo, hi;
  };
  std::vector<TrailEntry> trail_;
  std::vector<SpineNode> spine_;
  std::vector<std::vector<Occurrence>> occ_;
  std::vector<size_t> occ_count_;
  std::vector<long long> score_;
  std::vector<std::vector<int>> tier_vars_;
  std::vector<size_t> tier_unfixed_;
  std::vector<int> var_tier_slot_;
  std::vector<Occurrence> queue_;
  std::vector<char> in_queue_lin_, in_queue_impl_, in_queue_card_;
  std::vector<LinTerm> neg_buf_;

  SolveStats stats_;
  std::vector<TracePoint> trace_;
  StopReason stopped_ = StopReason::None;
  bool rlbt_fired_ = false;
  long long first_lb_ = -kInf;
  long long first_rlbt_lb_ = 0;
  long long root_lb_ = -kInf;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SolveResult solve(const SolveRequest& req) {
  SolveResult res;
  if (!req.model) {
    res.error = "no model";
    return res;
  }
  std::string bad = req.model->check_well_formed();
  if (!bad.empty()) {
    res.error = bad;
    return res;
  }

  Shared shared;
  int workers = std::max(1, req.workers);
  if (workers == 1) {
    Engine e(*req.model, req, shared, 0);
    res = e.run();
  } else {
    std::vector<SolveResult> results(workers);
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        Engine e(*req.model, req, shared, w);
        results[w] = e.run();
      });
    }
    for (auto& t : threads) t.join();
    res = results[0];
    for (const auto& r : results) {
      if (r.status == SolveStatus::Optimal || r.status == SolveStatus::Unsat) {
        res = r;
        break;
      }
    }
  }

  if (res.has_assignment()) {
    auto violations = req.model->verify(res.assignment);
    if (!violations.empty()) {
      res.error = "verifier rejected assignment at " + violations.front().constraint;
      res.status = SolveStatus::Unsat;
      res.assignment.clear();
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// External backend protocol

void write_result(std::ostream& out, const ConstraintModel& m, const SolveResult& r) {
  (void)m;
  out << "status " << to_string(r.status) << "\n";
  out << "objective " << r.objective_bound << "\n";
  out << "lower_bound " << r.lower_bound << "\n";
  if (r.has_assignment()) {
    out << "assign " << r.assignment.size();
    for (long long v : r.assignment) out << " " << v;
    out << "\n";
  }
  out << "done\n";
}

SolveResult read_result(std::istream& in, const ConstraintModel& m) {
  SolveResult r;
  std::string line;
  bool done = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "status") {
      std::string s;
      ls >> s;
      if (s == "OPTIMAL") r.status = SolveStatus::Optimal;
      else if (s == "FEASIBLE_GAP") r.status = SolveStatus::FeasibleGap;
      else if (s == "UNSAT") r.status = SolveStatus::Unsat;
      else if (s == "TIMEOUT") r.status = SolveStatus::Timeout;
      else throw std::runtime_error("external backend: bad status '" + s + "'");
    } else if (head == "objective") {
      ls >> r.objective_bound;
    } else if (head == "lower_bound") {
      ls >> r.lower_bound;
    } else if (head == "assign") {
      size_t n;
      ls >> n;
      r.assignment.resize(n);
      for (auto& v : r.assignment) {
        if (!(ls >> v)) throw std::runtime_error("external backend: short assignment");
      }
    } else if (head == "done") {
      done = true;
      break;
    }
  }
  if (!done) throw std::runtime_error("external backend: incomplete reply");
  if (r.has_assignment()) {
    if (r.assignment.size() != m.var_count()) {
      throw std::runtime_error("external backend: assignment size mismatch");
    }
    auto violations = m.verify(r.assignment);
    if (!violations.empty()) {
      throw std::runtime_error("external backend: invalid assignment at " +
                               violations.front().constraint);
    }
  }
  return r;
}

SolveResult solve_external(const ConstraintModel& m, const std::string& command) {
  char dir_template[] = "/tmp/cellforge.XXXXXX";
  char* dir_c = mkdtemp(dir_template);
  if (!dir_c) throw std::runtime_error("cannot create temp dir for external backend");
  std::string dir = dir_c;
  std::string in_path = dir + "/model.ir";
  std::string out_path = dir + "/result.txt";
  {
    std::ofstream f(in_path);
    m.emit(f);
  }
  std::string cmd = command + " < " + in_path + " > " + out_path;
  int rc = std::system(cmd.c_str());
  if (rc != 0) {
    throw std::runtime_error("external backend exited with status " + std::to_string(rc));
  }
  std::ifstream f(out_path);
  SolveResult r = read_result(f, m);
  std::remove(in_path.c_str());
  std::remove(out_path.c_str());
  rmdir(dir.c_str());
  return r;
}

void serve_ir(std::istream& in, std::ostream& out, const GapPolicy& policy,
              int workers, std::uint64_t seed) {
  ConstraintModel m = ConstraintModel::parse(in);
  SolveRequest req;
  req.model = &m;
  req.policy = policy;
  req.workers = workers;
  req.seed = seed;
  SolveResult r = solve(req);
  if (!r.error.empty()) throw std::runtime_error("malformed model: " + r.error);
  write_result(out, m, r);
}

}  // namespace cellforge
