#include "keel/egraph.hpp"

#include <algorithm>

namespace keel::prover {

using math::MathExp;
using math::Op;

namespace {

std::size_t weigh(const MathExp& e, std::size_t cap) {
  std::size_t n = 1;
  for (const auto& c : e.children()) {
    if (n >= cap) return cap;
    n += weigh(c, cap - n);
  }
  return std::min(n, cap);
}

}  // namespace

std::string EGraph::var_symbol(const MathExp& v) {
  return v.incoming() ? "#" + v.name() : math::primed(v.name(), v.level());
}

std::string EGraph::signature(Op op, const std::string& sym, const std::vector<TermId>& args) const {
  std::string key = std::to_string(static_cast<int>(op));
  key += '\x1f';
  key += sym;
  for (auto a : args) {
    key += '\x1f';
    key += std::to_string(find(a));
  }
  return key;
}

TermId EGraph::find(TermId t) const {
  TermId root = t;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[t] != root) {
    TermId next = parent_[t];
    parent_[t] = root;
    t = next;
  }
  return root;
}

std::optional<TermId> EGraph::lookup(Op op, const std::string& sym, const std::vector<TermId>& args) const {
  auto it = table_.find(signature(op, sym, args));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

TermId EGraph::make(Op op, std::string sym, std::vector<TermId> args, math::Sort sort, MathExp display) {
  auto key = signature(op, sym, args);
  if (auto it = table_.find(key); it != table_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  for (auto a : args) {
    auto& u = uses_[find(a)];
    if (u.empty() || u.back() != id) u.push_back(id);
  }
  const auto weight = weigh(display, weight_cap);
  terms_.push_back(Term{op, std::move(sym), std::move(args), std::move(sort), std::move(display), weight});
  parent_.push_back(id);
  members_.push_back({id});
  uses_.emplace_back();
  table_.emplace(std::move(key), id);
  ++version_;
  return id;
}

TermId EGraph::add(const MathExp& e) {
  std::vector<TermId> args;
  args.reserve(e.arity());
  for (std::size_t i = 0; i < e.arity(); ++i) args.push_back(add(e.child(i)));
  std::string sym;
  switch (e.op()) {
    case Op::Var: sym = var_symbol(e); break;
    case Op::IntLit: sym = e.value().str(); break;
    case Op::Apply: sym = e.name(); break;
    default: break;
  }
  return make(e.op(), std::move(sym), std::move(args), e.sort(), e);
}

bool EGraph::merge(TermId a, TermId b) {
  if (find(a) == find(b)) return false;
  std::vector<std::pair<TermId, TermId>> pending{{a, b}};
  while (!pending.empty()) {
    auto [x, y] = pending.back();
    pending.pop_back();
    TermId rx = find(x), ry = find(y);
    if (rx == ry) continue;
    // Keep the older representative when sizes tie so display stays stable.
    if (members_[rx].size() < members_[ry].size() || (members_[rx].size() == members_[ry].size() && ry < rx))
      std::swap(rx, ry);
    parent_[ry] = rx;
    ++version_;
    auto& mx = members_[rx];
    auto& my = members_[ry];
    mx.insert(mx.end(), my.begin(), my.end());
    std::sort(mx.begin(), mx.end());
    my.clear();
    my.shrink_to_fit();

    auto moved = std::move(uses_[ry]);
    uses_[ry].clear();
    for (auto p : moved) {
      const auto& t = terms_[p];
      auto key = signature(t.op, t.sym, t.args);
      auto [it, inserted] = table_.try_emplace(std::move(key), p);
      if (!inserted && find(it->second) != find(p)) pending.emplace_back(it->second, p);
      uses_[rx].push_back(p);
    }
  }
  return true;
}

std::vector<TermId> EGraph::classes() const {
  std::vector<TermId> out;
  for (TermId t = 0; t < terms_.size(); ++t)
    if (find(t) == t) out.push_back(t);
  return out;
}

}  // namespace keel::prover
