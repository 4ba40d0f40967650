#include "keel/math_exp.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace keel::math {

namespace detail {
struct Node {
  Op op = Op::True;
  Sort sort;
  std::vector<MathExp> children;
  std::string name;
  int level = 0;
  bool incoming = false;
  bool bound = false;
  BigInt value;
  std::size_t hash = 0;
};
MathExp wrap(std::shared_ptr<const Node> node) { return MathExp(std::move(node)); }
}  // namespace detail

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::shared_ptr<detail::Node> new_node(Op op, Sort sort) {
  auto n = std::make_shared<detail::Node>();
  n->op = op;
  n->sort = std::move(sort);
  return n;
}

void seal(detail::Node& n) {
  std::size_t h = std::hash<int>{}(static_cast<int>(n.op));
  h = mix(h, std::hash<std::string>{}(n.name));
  h = mix(h, static_cast<std::size_t>(n.level) * 4 + (n.incoming ? 2 : 0) + (n.bound ? 1 : 0));
  if (n.op == Op::IntLit) h = mix(h, std::hash<std::string>{}(n.value.str()));
  for (const auto& c : n.children) h = mix(h, c.hash());
  n.hash = h;
}

int precedence(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::And: return 2;
    case Op::Not: return 3;
    case Op::Eq:
    case Op::Neq:
    case Op::Le:
    case Op::Lt: return 4;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Concat: return 6;
    default: return 7;
  }
}

const char* infix(Op op) {
  switch (op) {
    case Op::Eq: return " = ";
    case Op::Neq: return " /= ";
    case Op::Le: return " <= ";
    case Op::Lt: return " < ";
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    default: return " ? ";
  }
}

std::string render_at(const MathExp& e, int min_prec);

std::string render_raw(const MathExp& e) {
  switch (e.op()) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::MinInt: return "min_int";
    case Op::MaxInt: return "max_int";
    case Op::Empty: return "empty_string";
    case Op::IntLit: return e.value().str();
    case Op::Var: return e.incoming() ? "#" + e.name() : primed(e.name(), e.level());
    case Op::Implies: return render_at(e.child(0), 2) + " implies " + render_at(e.child(1), 1);
    case Op::And: return render_at(e.child(0), 2) + " and " + render_at(e.child(1), 3);
    case Op::Not: return "not " + render_at(e.child(0), 4);
    case Op::Eq:
    case Op::Neq:
    case Op::Le:
    case Op::Lt: return render_at(e.child(0), 5) + infix(e.op()) + render_at(e.child(1), 5);
    case Op::Add:
    case Op::Sub: return render_at(e.child(0), 5) + infix(e.op()) + render_at(e.child(1), 6);
    case Op::Concat: {
      std::string out;
      for (std::size_t i = 0; i < e.arity(); ++i) {
        if (i) out += " o ";
        out += render_at(e.child(i), 7);
      }
      return out;
    }
    case Op::Reverse: return "Reverse(" + render_at(e.child(0), 0) + ")";
    case Op::Length: return "|" + render_at(e.child(0), 0) + "|";
    case Op::Singleton: return "<" + render_at(e.child(0), 0) + ">";
    case Op::Apply: {
      std::string out = e.name() + "(";
      for (std::size_t i = 0; i < e.arity(); ++i) {
        if (i) out += ", ";
        out += render_at(e.child(i), 0);
      }
      return out + ")";
    }
  }
  return "?";
}

std::string render_at(const MathExp& e, int min_prec) {
  auto s = render_raw(e);
  if (precedence(e.op()) < min_prec) return "(" + s + ")";
  return s;
}

}  // namespace

std::string Sort::str() const {
  switch (kind) {
    case SortKind::Bool: return "B";
    case SortKind::Int: return "Z";
    case SortKind::Str: return "Str(" + (element.empty() ? std::string("?") : element) + ")";
    case SortKind::Entry: return element.empty() ? "Entry" : element;
    case SortKind::Unknown: return "?";
  }
  return "?";
}

bool compatible(const Sort& a, const Sort& b) {
  if (a.kind == SortKind::Unknown || b.kind == SortKind::Unknown) return true;
  if (a.kind != b.kind) return false;
  return a.element.empty() || b.element.empty() || a.element == b.element;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::And: return "and";
    case Op::Implies: return "implies";
    case Op::Not: return "not";
    case Op::Eq: return "=";
    case Op::Neq: return "/=";
    case Op::Le: return "<=";
    case Op::Lt: return "<";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::IntLit: return "int";
    case Op::MinInt: return "min_int";
    case Op::MaxInt: return "max_int";
    case Op::Concat: return "o";
    case Op::Reverse: return "Reverse";
    case Op::Length: return "||";
    case Op::Singleton: return "<>";
    case Op::Empty: return "empty_string";
    case Op::Var: return "var";
    case Op::Apply: return "apply";
  }
  return "?";
}

MathExp::MathExp() : MathExp(mk_true()) {}

Op MathExp::op() const { return node_->op; }
const Sort& MathExp::sort() const { return node_->sort; }
std::span<const MathExp> MathExp::children() const { return node_->children; }
const std::string& MathExp::name() const { return node_->name; }
int MathExp::level() const { return node_->level; }
bool MathExp::incoming() const { return node_->incoming; }
bool MathExp::bound() const { return node_->bound; }
VarKey MathExp::key() const { return {node_->name, node_->level, node_->incoming, node_->bound}; }
const BigInt& MathExp::value() const { return node_->value; }
std::size_t MathExp::hash() const { return node_->hash; }
std::string MathExp::render() const { return render_raw(*this); }

bool MathExp::is_literal() const {
  switch (op()) {
    case Op::Eq:
    case Op::Neq:
    case Op::Le:
    case Op::Lt: return true;
    default: return false;
  }
}

bool operator==(const MathExp& a, const MathExp& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.hash != y.hash || x.op != y.op || x.name != y.name || x.level != y.level ||
      x.incoming != y.incoming || x.bound != y.bound ||
      x.children.size() != y.children.size())
    return false;
  if (x.op == Op::IntLit && x.value != y.value) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (!(x.children[i] == y.children[i])) return false;
  return true;
}

bool operator<(const MathExp& a, const MathExp& b) {
  if (a.node_ == b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.op != y.op) return x.op < y.op;
  if (x.name != y.name) return x.name < y.name;
  if (x.level != y.level) return x.level < y.level;
  if (x.incoming != y.incoming) return x.incoming < y.incoming;
  if (x.bound != y.bound) return x.bound < y.bound;
  if (x.op == Op::IntLit && x.value != y.value) return x.value < y.value;
  return std::lexicographical_compare(x.children.begin(), x.children.end(), y.children.begin(),
                                      y.children.end());
}

MathExp MathExp::make(Op op, Sort sort, std::vector<MathExp> children) {
  auto n = new_node(op, std::move(sort));
  n->children = std::move(children);
  seal(*n);
  return detail::wrap(std::move(n));
}

MathExp mk_true() {
  static const MathExp t = MathExp::make(Op::True, Sort::boolean(), {});
  return t;
}
MathExp mk_false() { return MathExp::make(Op::False, Sort::boolean(), {}); }
MathExp mk_bool(bool b) { return b ? mk_true() : mk_false(); }

MathExp mk_and(std::vector<MathExp> conjuncts) {
  if (conjuncts.empty()) return mk_true();
  MathExp acc = conjuncts.front();
  for (std::size_t i = 1; i < conjuncts.size(); ++i) acc = mk_and(acc, conjuncts[i]);
  return acc;
}
MathExp mk_and(MathExp a, MathExp b) {
  return MathExp::make(Op::And, Sort::boolean(), {std::move(a), std::move(b)});
}
MathExp mk_implies(MathExp a, MathExp b) {
  return MathExp::make(Op::Implies, Sort::boolean(), {std::move(a), std::move(b)});
}
MathExp mk_not(MathExp a) { return MathExp::make(Op::Not, Sort::boolean(), {std::move(a)}); }
MathExp mk_eq(MathExp a, MathExp b) {
  return MathExp::make(Op::Eq, Sort::boolean(), {std::move(a), std::move(b)});
}
MathExp mk_neq(MathExp a, MathExp b) {
  return MathExp::make(Op::Neq, Sort::boolean(), {std::move(a), std::move(b)});
}
MathExp mk_le(MathExp a, MathExp b) {
  return MathExp::make(Op::Le, Sort::boolean(), {std::move(a), std::move(b)});
}
MathExp mk_lt(MathExp a, MathExp b) {
  return MathExp::make(Op::Lt, Sort::boolean(), {std::move(a), std::move(b)});
}
MathExp mk_add(MathExp a, MathExp b) {
  return MathExp::make(Op::Add, Sort::integer(), {std::move(a), std::move(b)});
}
MathExp mk_sub(MathExp a, MathExp b) {
  return MathExp::make(Op::Sub, Sort::integer(), {std::move(a), std::move(b)});
}
MathExp mk_int(BigInt v) {
  auto n = new_node(Op::IntLit, Sort::integer());
  n->value = std::move(v);
  seal(*n);
  return detail::wrap(std::move(n));
}
MathExp mk_min_int() { return MathExp::make(Op::MinInt, Sort::integer(), {}); }
MathExp mk_max_int() { return MathExp::make(Op::MaxInt, Sort::integer(), {}); }

MathExp mk_concat(std::vector<MathExp> parts) {
  std::vector<MathExp> flat;
  std::string element;
  for (auto& p : parts) {
    if (element.empty()) element = p.sort().element;
    if (p.is(Op::Empty)) continue;
    if (p.is(Op::Concat)) {
      for (const auto& c : p.children()) flat.push_back(c);
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return mk_empty(element);
  if (flat.size() == 1) return flat.front();
  return MathExp::make(Op::Concat, Sort::string_of(element), std::move(flat));
}
MathExp mk_concat(MathExp a, MathExp b) { return mk_concat(std::vector<MathExp>{std::move(a), std::move(b)}); }

MathExp mk_reverse(MathExp a) {
  auto s = a.sort();
  return MathExp::make(Op::Reverse, std::move(s), {std::move(a)});
}
MathExp mk_length(MathExp a) { return MathExp::make(Op::Length, Sort::integer(), {std::move(a)}); }
MathExp mk_singleton(MathExp a) {
  auto s = Sort::string_of(a.sort().element);
  return MathExp::make(Op::Singleton, std::move(s), {std::move(a)});
}
MathExp mk_empty(std::string element) {
  return MathExp::make(Op::Empty, Sort::string_of(std::move(element)), {});
}

MathExp mk_var(std::string name, Sort sort, int level) {
  auto n = new_node(Op::Var, std::move(sort));
  n->name = std::move(name);
  n->level = level;
  seal(*n);
  return detail::wrap(std::move(n));
}

MathExp mk_incoming(std::string name, Sort sort) {
  auto n = new_node(Op::Var, std::move(sort));
  n->name = std::move(name);
  n->incoming = true;
  seal(*n);
  return detail::wrap(std::move(n));
}

MathExp mk_bound(std::string name, Sort sort) {
  auto n = new_node(Op::Var, std::move(sort));
  n->name = std::move(name);
  n->bound = true;
  seal(*n);
  return detail::wrap(std::move(n));
}

MathExp mk_apply(std::string fn, Sort sort, std::vector<MathExp> args) {
  auto n = new_node(Op::Apply, std::move(sort));
  n->name = std::move(fn);
  n->children = std::move(args);
  seal(*n);
  return detail::wrap(std::move(n));
}

MathExp with_sort(const MathExp& var, Sort sort) {
  if (!var.is(Op::Var)) return var;
  auto n = new_node(Op::Var, std::move(sort));
  n->name = var.name();
  n->level = var.level();
  n->incoming = var.incoming();
  n->bound = var.bound();
  seal(*n);
  return detail::wrap(std::move(n));
}

std::string primed(const std::string& name, int level) {
  return name + std::string(static_cast<std::size_t>(std::max(level, 0)), '\'');
}

namespace {

// Same node with new children; concatenation is re-canonicalized.
MathExp with_children(const MathExp& e, std::vector<MathExp> kids) {
  switch (e.op()) {
    case Op::Concat: return mk_concat(std::move(kids));
    case Op::Reverse: return mk_reverse(std::move(kids[0]));
    case Op::Singleton: return mk_singleton(std::move(kids[0]));
    case Op::Apply: return mk_apply(e.name(), e.sort(), std::move(kids));
    default: return MathExp::make(e.op(), e.sort(), std::move(kids));
  }
}

template <typename Leaf>
MathExp map_tree(const MathExp& e, const Leaf& leaf) {
  if (e.is(Op::Var)) return leaf(e);
  if (e.arity() == 0) return e;
  std::vector<MathExp> kids;
  kids.reserve(e.arity());
  for (const auto& c : e.children()) kids.push_back(map_tree(c, leaf));
  return with_children(e, std::move(kids));
}

}  // namespace

MathExp substitute(const MathExp& exp, const Bindings& bindings) {
  if (bindings.empty()) return exp;
  return map_tree(exp, [&](const MathExp& v) {
    auto it = bindings.find(v.key());
    if (it == bindings.end()) return v;
    if (!compatible(v.sort(), it->second.sort()))
      throw SortMismatch("cannot bind " + v.render() + " : " + v.sort().str() + " to " +
                         it->second.render() + " : " + it->second.sort().str());
    return it->second;
  });
}

MathExp canonicalize(const MathExp& exp) {
  return map_tree(exp, [](const MathExp& v) { return v; });
}

std::vector<MathExp> split_conjuncts(const MathExp& exp) {
  std::vector<MathExp> out;
  std::function<void(const MathExp&)> walk = [&](const MathExp& e) {
    if (e.is(Op::And)) {
      walk(e.child(0));
      walk(e.child(1));
    } else {
      out.push_back(e);
    }
  };
  walk(exp);
  return out;
}

MathExp negate(const MathExp& exp) {
  switch (exp.op()) {
    case Op::True: return mk_false();
    case Op::False: return mk_true();
    case Op::Not: return exp.child(0);
    case Op::Eq: return mk_neq(exp.child(0), exp.child(1));
    case Op::Neq: return mk_eq(exp.child(0), exp.child(1));
    case Op::Le: return mk_lt(exp.child(1), exp.child(0));
    case Op::Lt: return mk_le(exp.child(1), exp.child(0));
    default: return mk_not(exp);
  }
}

std::vector<VarKey> free_vars(const MathExp& exp) {
  std::vector<VarKey> out;
  std::set<VarKey> seen;
  std::function<void(const MathExp&)> walk = [&](const MathExp& e) {
    if (e.is(Op::Var)) {
      if (!e.bound() && seen.insert(e.key()).second) out.push_back(e.key());
      return;
    }
    for (const auto& c : e.children()) walk(c);
  };
  walk(exp);
  return out;
}

namespace {
template <typename Pred>
bool any_var(const MathExp& e, const Pred& pred) {
  if (e.is(Op::Var)) return pred(e);
  for (const auto& c : e.children())
    if (any_var(c, pred)) return true;
  return false;
}
}  // namespace

bool has_incoming(const MathExp& exp) {
  return any_var(exp, [](const MathExp& v) { return v.incoming(); });
}

bool has_bound(const MathExp& exp) {
  return any_var(exp, [](const MathExp& v) { return v.bound(); });
}

}  // namespace keel::math
