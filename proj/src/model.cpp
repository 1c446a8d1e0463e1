#include "cellforge/model.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cellforge {

int ConstraintModel::add_bool(const std::string& name, int tier, long long polarity) {
  Var v;
  v.kind = VarKind::Bool;
  v.lb = 0;
  v.ub = 1;
  v.name = name;
  v.tier = tier;
  v.polarity = polarity;
  vars_.push_back(v);
  return static_cast<int>(vars_.size()) - 1;
}

int ConstraintModel::add_int(long long lb, long long ub, const std::string& name, int tier) {
  Var v;
  v.kind = VarKind::Int;
  v.lb = lb;
  v.ub = ub;
  v.name = name;
  v.tier = tier;
  v.polarity = lb;
  vars_.push_back(v);
  return static_cast<int>(vars_.size()) - 1;
}

int ConstraintModel::add_lin(std::vector<LinTerm> terms, Cmp op, long long rhs,
                             std::string tag) {
  LinCon c;
  for (const auto& t : terms) {
    if (t.coef != 0) c.terms.push_back(t);
  }
  c.op = op;
  c.rhs = rhs;
  c.tag = std::move(tag);
  lins_.push_back(std::move(c));
  return static_cast<int>(lins_.size()) - 1;
}

int ConstraintModel::add_impl(Lit cond, std::vector<LinTerm> terms, Cmp op,
                              long long rhs, std::string tag) {
  ImplCon c;
  c.cond = cond;
  for (const auto& t : terms) {
    if (t.coef != 0) c.lin.terms.push_back(t);
  }
  c.lin.op = op;
  c.lin.rhs = rhs;
  c.lin.tag = std::move(tag);
  impls_.push_back(std::move(c));
  return static_cast<int>(impls_.size()) - 1;
}

int ConstraintModel::add_card(std::vector<Lit> lits, int bound, std::string tag) {
  CardCon c;
  c.lits = std::move(lits);
  c.bound = bound;
  c.tag = std::move(tag);
  cards_.push_back(std::move(c));
  return static_cast<int>(cards_.size()) - 1;
}

void ConstraintModel::add_at_most_one(std::vector<Lit> lits, std::string tag) {
  if (lits.size() > 1) add_card(std::move(lits), 1, std::move(tag));
}

void ConstraintModel::add_le(int x, int y, long long offset, std::string tag) {
  add_lin({{1, x}, {-1, y}}, Cmp::Le, offset, std::move(tag));
}

void ConstraintModel::add_and_implies(int b1, int b2, int b3, std::string tag) {
  add_lin({{1, b1}, {1, b2}, {-1, b3}}, Cmp::Le, 1, std::move(tag));
}

void ConstraintModel::set_objective(std::vector<LinTerm> terms, long long offset) {
  obj_terms_.clear();
  for (const auto& t : terms) {
    if (t.coef != 0) obj_terms_.push_back(t);
  }
  obj_offset_ = offset;
}

size_t ConstraintModel::bool_count() const {
  return static_cast<size_t>(
      std::count_if(vars_.begin(), vars_.end(),
                    [](const Var& v) { return v.kind == VarKind::Bool; }));
}

size_t ConstraintModel::int_count() const { return vars_.size() - bool_count(); }

long long ConstraintModel::eval_objective(const std::vector<long long>& a) const {
  long long v = obj_offset_;
  for (const auto& t : obj_terms_) v += t.coef * a[t.var];
  return v;
}

namespace {

long long eval_terms(const std::vector<LinTerm>& terms, const std::vector<long long>& a) {
  long long v = 0;
  for (const auto& t : terms) v += t.coef * a[t.var];
  return v;
}

bool holds(Cmp op, long long lhs, long long rhs) {
  switch (op) {
    case Cmp::Le: return lhs <= rhs;
    case Cmp::Ge: return lhs >= rhs;
    default: return lhs == rhs;
  }
}

const char* cmp_name(Cmp op) {
  switch (op) {
    case Cmp::Le: return "le";
    case Cmp::Ge: return "ge";
    default: return "eq";
  }
}

bool lit_true(const Lit& l, const std::vector<long long>& a) {
  return l.neg ? a[l.var] == 0 : a[l.var] != 0;
}

}  // namespace

std::vector<Violation> ConstraintModel::verify(const std::vector<long long>& a) const {
  if (a.size() != vars_.size()) {
    throw std::invalid_argument("incomplete assignment: " + std::to_string(a.size()) +
                                " values for " + std::to_string(vars_.size()) + " vars");
  }
  std::vector<Violation> out;
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (a[i] < vars_[i].lb || a[i] > vars_[i].ub) {
      out.push_back({"var:" + std::to_string(i),
                     vars_[i].name + " = " + std::to_string(a[i]) + " out of bounds"});
    }
  }
  for (size_t i = 0; i < lins_.size(); ++i) {
    long long lhs = eval_terms(lins_[i].terms, a);
    if (!holds(lins_[i].op, lhs, lins_[i].rhs)) {
      out.push_back({"lin:" + std::to_string(i) + (lins_[i].tag.empty() ? "" : " " + lins_[i].tag),
                     std::to_string(lhs) + " !" + cmp_name(lins_[i].op) + " " +
                         std::to_string(lins_[i].rhs)});
    }
  }
  for (size_t i = 0; i < impls_.size(); ++i) {
    if (!lit_true(impls_[i].cond, a)) continue;
    long long lhs = eval_terms(impls_[i].lin.terms, a);
    if (!holds(impls_[i].lin.op, lhs, impls_[i].lin.rhs)) {
      out.push_back({"impl:" + std::to_string(i) +
                         (impls_[i].lin.tag.empty() ? "" : " " + impls_[i].lin.tag),
                     std::to_string(lhs) + " !" + cmp_name(impls_[i].lin.op) + " " +
                         std::to_string(impls_[i].lin.rhs)});
    }
  }
  for (size_t i = 0; i < cards_.size(); ++i) {
    int cnt = 0;
    for (const auto& l : cards_[i].lits) cnt += lit_true(l, a) ? 1 : 0;
    if (cnt > cards_[i].bound) {
      out.push_back({"card:" + std::to_string(i) +
                         (cards_[i].tag.empty() ? "" : " " + cards_[i].tag),
                     std::to_string(cnt) + " > " + std::to_string(cards_[i].bound)});
    }
  }
  return out;
}

std::string ConstraintModel::check_well_formed() const {
  int n = static_cast<int>(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].lb > vars_[i].ub) return "var:" + std::to_string(i);
  }
  auto check_terms = [&](const std::vector<LinTerm>& ts) {
    for (const auto& t : ts) {
      if (t.var < 0 || t.var >= n) return false;
    }
    return true;
  };
  for (size_t i = 0; i < lins_.size(); ++i) {
    if (!check_terms(lins_[i].terms)) return "lin:" + std::to_string(i);
  }
  for (size_t i = 0; i < impls_.size(); ++i) {
    if (impls_[i].cond.var < 0 || impls_[i].cond.var >= n ||
        vars_[impls_[i].cond.var].kind != VarKind::Bool || !check_terms(impls_[i].lin.terms)) {
      return "impl:" + std::to_string(i);
    }
  }
  for (size_t i = 0; i < cards_.size(); ++i) {
    for (const auto& l : cards_[i].lits) {
      if (l.var < 0 || l.var >= n || vars_[l.var].kind != VarKind::Bool) {
        return "card:" + std::to_string(i);
      }
    }
  }
  if (!check_terms(obj_terms_)) return "objective";
  return "";
}

// ---------------------------------------------------------------------------
// Text IR

namespace {

void emit_terms(std::ostream& os, const std::vector<LinTerm>& terms) {
  os << terms.size();
  for (const auto& t : terms) os << " " << t.coef << " " << t.var;
}

void emit_lit(std::ostream& os, const Lit& l) {
  os << (l.neg ? "-" : "+") << (l.var + 1);
}

std::vector<LinTerm> parse_terms(std::istream& is) {
  size_t k;
  if (!(is >> k)) throw std::runtime_error("model ir: expected term count");
  std::vector<LinTerm> ts(k);
  for (auto& t : ts) {
    if (!(is >> t.coef >> t.var)) throw std::runtime_error("model ir: bad term");
  }
  return ts;
}

Lit parse_lit(std::istream& is) {
  long long v;
  if (!(is >> v) || v == 0) throw std::runtime_error("model ir: bad literal");
  Lit l;
  l.neg = v < 0;
  l.var = static_cast<int>((v < 0 ? -v : v) - 1);
  return l;
}

Cmp parse_cmp(const std::string& s) {
  if (s == "le") return Cmp::Le;
  if (s == "ge") return Cmp::Ge;
  if (s == "eq") return Cmp::Eq;
  throw std::runtime_error("model ir: bad comparator '" + s + "'");
}

}  // namespace

void ConstraintModel::emit(std::ostream& os) const {
  os << "model " << (name.empty() ? "anonymous" : name) << "\n";
  for (const auto& v : vars_) {
    if (v.kind == VarKind::Bool) {
      os << "var b " << v.tier << " " << v.polarity << " " << v.name << "\n";
    } else {
      os << "var i " << v.lb << " " << v.ub << " " << v.tier << " " << v.name << "\n";
    }
  }
  for (const auto& c : lins_) {
    os << "lin " << cmp_name(c.op) << " " << c.rhs << " ";
    emit_terms(os, c.terms);
    os << "\n";
  }
  for (const auto& c : impls_) {
    os << "imp ";
    emit_lit(os, c.cond);
    os << " " << cmp_name(c.lin.op) << " " << c.lin.rhs << " ";
    emit_terms(os, c.lin.terms);
    os << "\n";
  }
  for (const auto& c : cards_) {
    os << "card " << c.bound << " " << c.lits.size();
    for (const auto& l : c.lits) {
      os << " ";
      emit_lit(os, l);
    }
    os << "\n";
  }
  os << "min " << obj_offset_ << " ";
  emit_terms(os, obj_terms_);
  os << "\n";
  os << "end\n";
}

ConstraintModel ConstraintModel::parse(std::istream& is) {
  ConstraintModel m;
  std::string line;
  bool done = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "model") {
      ls >> m.name;
    } else if (head == "var") {
      std::string kind;
      ls >> kind;
      if (kind == "b") {
        int tier;
        long long pol;
        std::string name;
        ls >> tier >> pol;
        std::getline(ls, name);
        if (!name.empty() && name[0] == ' ') name.erase(0, 1);
        m.add_bool(name, tier, pol);
      } else if (kind == "i") {
        long long lb, ub;
        int tier;
        std::string name;
        ls >> lb >> ub >> tier;
        std::getline(ls, name);
        if (!name.empty() && name[0] == ' ') name.erase(0, 1);
        m.add_int(lb, ub, name, tier);
      } else {
        throw std::runtime_error("model ir: bad var kind '" + kind + "'");
      }
    } else if (head == "lin") {
      std::string op;
      long long rhs;
      ls >> op >> rhs;
      m.add_lin(parse_terms(ls), parse_cmp(op), rhs);
    } else if (head == "imp") {
      Lit cond = parse_lit(ls);
      std::string op;
      long long rhs;
      ls >> op >> rhs;
      m.add_impl(cond, parse_terms(ls), parse_cmp(op), rhs);
    } else if (head == "card") {
      int bound;
      size_t k;
      ls >> bound >> k;
      std::vector<Lit> lits(k);
      for (auto& l : lits) l = parse_lit(ls);
      m.add_card(std::move(lits), bound);
    } else if (head == "min") {
      long long offset;
      ls >> offset;
      m.set_objective(parse_terms(ls), offset);
    } else if (head == "end") {
      done = true;
      break;
    } else {
      throw std::runtime_error("model ir: unknown line '" + head + "'");
    }
  }
  if (!done) throw std::runtime_error("model ir: missing end");
  std::string bad = m.check_well_formed();
  if (!bad.empty()) throw std::runtime_error("model ir: malformed constraint " + bad);
  return m;
}

}  // namespace cellforge
