#include "keel/prover.hpp"

#include "linear.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace keel::prover {

using math::MathExp;
using math::Op;
using theory::Theorem;

const char* status_name(Status s) {
  switch (s) {
    case Status::Proved: return "proved";
    case Status::Unprovable: return "unprovable";
    case Status::Timeout: return "timeout";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

struct Fact {
  Op op;  // Le, Lt, Neq
  TermId a, b;
};

// A universal is bound to a run of classes; runs longer than one only arise
// for string variables matched inside a concatenation.
using Run = std::vector<TermId>;
using Subst = std::map<std::string, Run>;

bool is_relation(Op op) { return op == Op::Le || op == Op::Lt || op == Op::Neq; }

MathExp relation(Op op, MathExp a, MathExp b) {
  switch (op) {
    case Op::Eq: return math::mk_eq(std::move(a), std::move(b));
    case Op::Neq: return math::mk_neq(std::move(a), std::move(b));
    case Op::Le: return math::mk_le(std::move(a), std::move(b));
    default: return math::mk_lt(std::move(a), std::move(b));
  }
}

}  // namespace

struct ProofSession::Impl {
  Budget budget;
  Clock::time_point deadline;
  EGraph g;
  std::vector<Fact> facts;
  std::vector<MathExp> implications;
  std::vector<TraceStep> trace;
  std::set<std::string> instantiated;
  int rounds = 0;
  unsigned ticks = 0;
  bool growth_capped = false;
  static constexpr std::size_t max_display_weight = 64;

  // Linear layer cache, rebuilt whenever the term store changes.
  std::uint64_t lin_version = ~std::uint64_t{0};
  std::size_t lin_facts = 0;
  LinearSystem system;
  std::vector<Lin> fact_forms;

  explicit Impl(Budget b) : budget(b), deadline(Clock::now() + b.timeout) {}

  void tick() {
    if ((++ticks & 0xff) == 0 && Clock::now() > deadline) throw TimedOut{};
  }

  // ------------------------------------------------------------- terms

  // Lightest member, oldest on ties. Picking by weight keeps displays of
  // cyclic classes (S = T o S o <E>) from compounding.
  TermId lightest(TermId t) const {
    TermId best = g.members(t).front();
    for (auto m : g.members(t))
      if (g.term(m).weight < g.term(best).weight) best = m;
    return best;
  }
  MathExp display(TermId t) const { return g.term(lightest(t)).exp; }
  std::size_t display_weight(const std::vector<TermId>& parts) const {
    std::size_t w = 1;
    for (auto p : parts) w += g.term(lightest(p)).weight;
    return w;
  }

  bool is_int(TermId t) const {
    for (auto m : g.members(t))
      if (g.term(m).sort.is_int()) return true;
    return false;
  }

  bool holds_empty(TermId t) const {
    for (auto m : g.members(t))
      if (g.term(m).op == Op::Empty) return true;
    return false;
  }

  math::Sort str_sort(const std::vector<TermId>& args) const {
    for (auto a : args) {
      const auto& s = g.term(a).sort;
      if (s.is_str() && !s.element.empty()) return s;
    }
    return math::Sort::string_of("");
  }

  TermId concat(std::vector<TermId> args) {
    std::vector<TermId> kept;
    for (auto a : args)
      if (!holds_empty(a)) kept.push_back(g.find(a));
    if (kept.empty()) return g.add(math::mk_empty());
    if (kept.size() == 1) return kept.front();
    std::vector<MathExp> parts;
    for (auto a : kept) parts.push_back(display(a));
    auto sort = str_sort(kept);
    return g.make(Op::Concat, "", std::move(kept), sort, math::mk_concat(std::move(parts)));
  }

  TermId materialize(const Run& run) { return run.size() == 1 ? g.find(run.front()) : concat(run); }

  math::Sort result_sort(Op op, const std::vector<TermId>& args) const {
    switch (op) {
      case Op::Length:
      case Op::Add:
      case Op::Sub: return math::Sort::integer();
      case Op::Reverse: return g.term(args.front()).sort;
      case Op::Singleton: return math::Sort::string_of(g.term(args.front()).sort.element);
      default: return math::Sort::boolean();
    }
  }

  // Ground instance of a pattern under `s`.
  TermId build(const MathExp& pat, const Subst& s) {
    if (!math::has_bound(pat)) return g.add(pat);
    if (pat.is(Op::Var)) return materialize(s.at(pat.name()));
    if (pat.is(Op::Concat)) {
      Run args;
      for (const auto& part : pat.children()) {
        if (part.is(Op::Var) && part.bound()) {
          const auto& r = s.at(part.name());
          args.insert(args.end(), r.begin(), r.end());
        } else {
          args.push_back(build(part, s));
        }
      }
      return concat(std::move(args));
    }
    std::vector<TermId> args;
    std::vector<MathExp> shown;
    for (const auto& c : pat.children()) {
      args.push_back(build(c, s));
      shown.push_back(display(args.back()));
    }
    auto sort = result_sort(pat.op(), args);
    return g.make(pat.op(), "", std::move(args), sort, MathExp::make(pat.op(), sort, std::move(shown)));
  }

  // Existing term for a ground pattern, without interning it.
  std::optional<TermId> lookup(const MathExp& e) const {
    std::vector<TermId> args;
    for (const auto& c : e.children()) {
      auto t = lookup(c);
      if (!t) return std::nullopt;
      args.push_back(*t);
    }
    std::string sym;
    if (e.is(Op::Var)) sym = EGraph::var_symbol(e);
    if (e.is(Op::IntLit)) sym = e.value().str();
    if (e.is(Op::Apply)) sym = e.name();
    return g.lookup(e.op(), sym, args);
  }

  // ------------------------------------------------------------ facts

  bool add_relation(Op op, TermId a, TermId b) {
    for (const auto& f : facts) {
      if (f.op != op) continue;
      bool same = g.congruent(f.a, a) && g.congruent(f.b, b);
      if (op == Op::Neq) same = same || (g.congruent(f.a, b) && g.congruent(f.b, a));
      if (same) return false;
    }
    facts.push_back(Fact{op, a, b});
    return true;
  }

  bool assert_ids(Op op, TermId a, TermId b) {
    if (op == Op::Eq) return g.merge(a, b);
    if (is_relation(op)) return add_relation(op, a, b);
    return false;
  }

  void assert_exp(const MathExp& e) {
    switch (e.op()) {
      case Op::True: return;
      case Op::And:
        for (const auto& c : math::split_conjuncts(e)) assert_exp(c);
        return;
      case Op::Not: {
        auto n = math::negate(e.child(0));
        if (!n.is(Op::Not)) assert_exp(n);
        return;
      }
      case Op::Implies: implications.push_back(e); return;
      case Op::Eq:
      case Op::Neq:
      case Op::Le:
      case Op::Lt: assert_ids(e.op(), g.add(e.child(0)), g.add(e.child(1))); return;
      default: return;  // `false` and opaque atoms are recorded nowhere: no refutation
    }
  }

  // ----------------------------------------------------------- linear

  void refresh_linear() {
    if (lin_version == g.version() && lin_facts == facts.size()) return;
    lin_version = g.version();
    lin_facts = facts.size();
    system = LinearSystem{};
    for (auto c : g.classes()) {
      if (!is_int(c)) continue;
      for (auto m : g.members(c)) {
        const auto& t = g.term(m);
        Lin row;
        row.coef[c] = 1;
        if (t.op == Op::IntLit) {
          row.constant = -Rational(math::BigInt(t.sym));
        } else if (t.op == Op::Add || t.op == Op::Sub) {
          row.add(atom(t.args[0]), -1);
          row.add(atom(t.args[1]), t.op == Op::Add ? -1 : 1);
        } else {
          continue;
        }
        system.add_equation(std::move(row));
      }
    }
    fact_forms.clear();
    for (const auto& f : facts) {
      if (f.op == Op::Neq || !is_int(f.a)) continue;
      fact_forms.push_back(system.reduce(le_form(f.a, f.b, f.op == Op::Lt)));
    }
  }

  Lin atom(TermId t) const {
    Lin l;
    l.coef[g.find(t)] = 1;
    return l;
  }

  // a - b (+1 when strict), meaning `<= 0`.
  Lin le_form(TermId a, TermId b, bool strict) const {
    Lin l = atom(a);
    l.add(atom(b), -1);
    if (strict) l.constant += 1;
    return l;
  }

  bool entails_le(TermId a, TermId b, bool strict) {
    refresh_linear();
    auto goal = system.reduce(le_form(a, b, strict));
    if (goal.is_constant()) return goal.constant <= 0;
    return entails_nonpositive(goal, fact_forms, 4, [this] { tick(); });
  }

  // ------------------------------------------------------------ checks

  bool holds_ids(Op op, TermId a, TermId b) {
    if (op == Op::Eq) {
      if (g.congruent(a, b)) return true;
      if (!is_int(a) || !is_int(b)) return false;
      refresh_linear();
      auto d = system.reduce(le_form(a, b, false));
      if (d.is_constant()) return d.constant == 0;
      return entails_le(a, b, false) && entails_le(b, a, false);
    }
    if (op == Op::Neq) {
      for (const auto& f : facts) {
        if (f.op != Op::Neq) continue;
        if ((g.congruent(f.a, a) && g.congruent(f.b, b)) || (g.congruent(f.a, b) && g.congruent(f.b, a))) return true;
      }
      if (!is_int(a) || !is_int(b)) return false;
      refresh_linear();
      auto d = system.reduce(le_form(a, b, false));
      if (d.is_constant()) return d.constant != 0;
      return entails_le(a, b, true) || entails_le(b, a, true);
    }
    if (op == Op::Le || op == Op::Lt) {
      for (const auto& f : facts)
        if (g.congruent(f.a, a) && g.congruent(f.b, b) && (f.op == op || f.op == Op::Lt)) return true;
      return is_int(a) && is_int(b) && entails_le(a, b, op == Op::Lt);
    }
    return false;
  }

  bool holds(const MathExp& e) {
    switch (e.op()) {
      case Op::True: return true;
      case Op::And:
        for (const auto& c : math::split_conjuncts(e))
          if (!holds(c)) return false;
        return true;
      case Op::Not: {
        auto n = math::negate(e.child(0));
        return !n.is(Op::Not) && holds(n);
      }
      case Op::Implies: return holds(e.child(1));
      case Op::Eq:
      case Op::Neq:
      case Op::Le:
      case Op::Lt: return holds_ids(e.op(), g.add(e.child(0)), g.add(e.child(1)));
      default: return false;
    }
  }

  // ---------------------------------------------------------- matching

  using Yield = std::function<void(Subst&)>;

  bool same_binding(const Run& bound, const Run& run) {
    if (bound.size() == run.size()) {
      bool all = true;
      for (std::size_t i = 0; i < run.size() && all; ++i) all = g.congruent(bound[i], run[i]);
      if (all) return true;
    }
    return g.congruent(materialize(bound), materialize(run));
  }

  void bind(const std::string& var, Run run, Subst& s, const Yield& k) {
    if (auto it = s.find(var); it != s.end()) {
      if (same_binding(it->second, run)) k(s);
      return;
    }
    s.emplace(var, std::move(run));
    k(s);
    s.erase(var);
  }

  void match_class(const MathExp& pat, TermId cls, Subst& s, const Yield& k) {
    tick();
    if (pat.is(Op::Var) && pat.bound()) return bind(pat.name(), Run{g.find(cls)}, s, k);
    if (!math::has_bound(pat)) {
      auto t = lookup(pat);
      if (t && g.congruent(*t, cls)) k(s);
      return;
    }
    const auto members = g.members(cls);
    for (auto m : members) match_term(pat, m, s, k);
  }

  void match_term(const MathExp& pat, TermId t, Subst& s, const Yield& k) {
    tick();
    if (pat.is(Op::Var) && pat.bound()) return bind(pat.name(), Run{g.find(t)}, s, k);
    if (g.term(t).op != pat.op()) return;
    const auto args = g.term(t).args;  // callbacks may grow the store
    if (pat.is(Op::Concat)) return match_parts(pat, 0, args, 0, s, k);
    if (args.size() != pat.arity()) return;
    match_children(pat, 0, args, s, k);
  }

  void match_children(const MathExp& pat, std::size_t i, const std::vector<TermId>& args, Subst& s, const Yield& k) {
    if (i == pat.arity()) return k(s);
    match_class(pat.child(i), args[i], s, [&](Subst& s2) { match_children(pat, i + 1, args, s2, k); });
  }

  // Pattern parts p_i.. against concatenation arguments a_j..; a bound string
  // variable takes a nonempty run, anything else exactly one argument.
  void match_parts(const MathExp& pat, std::size_t i, const std::vector<TermId>& args, std::size_t j, Subst& s,
                   const Yield& k) {
    const std::size_t parts = pat.arity();
    if (i == parts) {
      if (j == args.size()) k(s);
      return;
    }
    const auto& part = pat.child(i);
    const std::size_t left = parts - i - 1;
    if (args.size() < j + 1 + left) return;
    if (part.is(Op::Var) && part.bound() && part.sort().is_str()) {
      for (std::size_t len = 1; j + len + left <= args.size(); ++len) {
        Run run(args.begin() + static_cast<long>(j), args.begin() + static_cast<long>(j + len));
        for (auto& r : run) r = g.find(r);
        bind(part.name(), std::move(run), s, [&](Subst& s2) { match_parts(pat, i + 1, args, j + len, s2, k); });
      }
      return;
    }
    match_class(part, args[j], s, [&](Subst& s2) { match_parts(pat, i + 1, args, j + 1, s2, k); });
  }

  void matches(const MathExp& trig, const Yield& k) {
    Subst s;
    const auto n = static_cast<TermId>(g.size());
    if (trig.is(Op::Eq)) {
      for (auto c : g.classes()) {
        const auto members = g.members(c);
        if (members.size() < 2) continue;
        for (auto t1 : members)
          for (auto t2 : members)
            if (t1 != t2)
              match_term(trig.child(0), t1, s, [&](Subst& s2) { match_term(trig.child(1), t2, s2, k); });
      }
      return;
    }
    if (is_relation(trig.op())) {
      const auto snapshot = facts;
      for (const auto& f : snapshot) {
        if (f.op != trig.op()) continue;
        match_class(trig.child(0), f.a, s, [&](Subst& s2) { match_class(trig.child(1), f.b, s2, k); });
        if (f.op == Op::Neq)
          match_class(trig.child(0), f.b, s, [&](Subst& s2) { match_class(trig.child(1), f.a, s2, k); });
      }
      return;
    }
    if (!math::has_bound(trig)) {
      if (lookup(trig)) k(s);
      return;
    }
    for (TermId t = 0; t < n; ++t)
      if (g.term(t).op == trig.op()) match_term(trig, t, s, k);
  }

  // ------------------------------------------------------ concatenation

  // Associativity and identity of `o` over classes: replace any argument
  // run by another concatenation (or single term) known equal to it, and
  // drop arguments equal to empty_string.
  bool closure_pass() {
    bool changed = false;
    const auto n = static_cast<TermId>(g.size());
    for (TermId t = 0; t < n; ++t) {
      if (g.term(t).op != Op::Concat) continue;
      if (g.size() > budget.max_terms) {
        growth_capped = true;
        return changed;
      }
      std::vector<TermId> args;
      for (auto a : g.term(t).args) args.push_back(g.find(a));
      if (std::any_of(args.begin(), args.end(), [&](TermId a) { return holds_empty(a); }))
        changed |= g.merge(t, concat(args));
      const std::size_t k = args.size();
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j <= k; ++j) {
          tick();
          if (i == 0 && j == k) continue;
          std::optional<TermId> range_term;
          if (j - i == 1) {
            range_term = args[i];
          } else {
            range_term = g.lookup(Op::Concat, "", std::vector<TermId>(args.begin() + static_cast<long>(i),
                                                                       args.begin() + static_cast<long>(j)));
          }
          if (!range_term) continue;
          const auto members = g.members(*range_term);
          for (auto m : members) {
            std::vector<TermId> repl;
            if (g.term(m).op == Op::Concat) {
              repl = g.term(m).args;
              if (j - i > 1 && g.congruent(m, *range_term) && repl.size() == j - i) {
                bool same = true;
                for (std::size_t x = 0; x < repl.size() && same; ++x) same = g.congruent(repl[x], args[i + x]);
                if (same) continue;
              }
            } else if (j - i > 1) {
              repl = {m};
            } else {
              continue;
            }
            if (k - (j - i) + repl.size() > budget.max_concat_arity) continue;
            std::vector<TermId> next(args.begin(), args.begin() + static_cast<long>(i));
            next.insert(next.end(), repl.begin(), repl.end());
            next.insert(next.end(), args.begin() + static_cast<long>(j), args.end());
            if (display_weight(next) > max_display_weight) continue;
            changed |= g.merge(t, concat(std::move(next)));
          }
        }
      }
    }
    return changed;
  }

  void close_concat() {
    for (int pass = 0; pass < 4 && closure_pass(); ++pass) {
    }
  }

  // ------------------------------------------------------ instantiation

  struct Candidate {
    const Theorem* theorem;
    Subst subst;
  };

  // Identifies an instantiation by the classes bound; builds no terms.
  std::string key(const Theorem& th, const Subst& s) const {
    std::string out = th.name;
    for (const auto& u : th.universals) {
      out += ':';
      for (auto r : s.at(u.name())) out += std::to_string(g.find(r)) + ',';
    }
    return out;
  }

  struct CandidateCap {};

  enum class Outcome { Blocked, Known, New };

  Outcome apply(const Candidate& c) {
    const auto& th = *c.theorem;
    if (th.hypothesis) {
      for (const auto& h : math::split_conjuncts(*th.hypothesis))
        if (!holds_ids(h.op(), build(h.child(0), c.subst), build(h.child(1), c.subst))) return Outcome::Blocked;
    }
    const auto& concl = th.conclusion;
    TermId a = build(concl.child(0), c.subst);
    TermId b = build(concl.child(1), c.subst);
    if (!assert_ids(concl.op(), a, b)) return Outcome::Known;
    TraceStep step;
    step.rule = th.name;
    for (const auto& u : th.universals)
      step.bindings.emplace_back(u.name(), display(materialize(c.subst.at(u.name()))).render());
    step.fact = relation(concl.op(), g.term(a).exp, g.term(b).exp).render();
    trace.push_back(std::move(step));
    return Outcome::New;
  }

  bool round(const std::vector<Theorem>& theorems) {
    close_concat();
    std::vector<Candidate> found;
    std::set<std::string> seen;
    try {
      for (const auto& th : theorems) {
        for (const auto& trig : th.triggers) {
          matches(trig, [&](Subst& s) {
            for (const auto& u : th.universals)
              if (!s.count(u.name())) return;
            auto k = key(th, s);
            if (instantiated.count(k) || !seen.insert(k).second) return;
            found.push_back(Candidate{&th, s});
            if (found.size() >= budget.max_candidates) throw CandidateCap{};
          });
        }
      }
    } catch (const CandidateCap&) {
      growth_capped = true;
    }
    bool progress = false;
    for (const auto& c : found) {
      if (g.size() > budget.max_terms) {
        growth_capped = true;
        break;
      }
      // A blocked candidate is retried in later rounds, when more may hold.
      auto outcome = apply(c);
      progress |= outcome == Outcome::New;
      if (outcome != Outcome::Blocked) instantiated.insert(key(*c.theorem, c.subst));
    }
    for (const auto& imp : implications)
      if (holds(imp.child(0))) {
        auto before = g.version() + facts.size();
        assert_exp(imp.child(1));
        progress |= before != g.version() + facts.size();
      }
    close_concat();
    return progress;
  }

  void saturate(const std::vector<Theorem>& theorems) {
    for (int r = 0; r < budget.max_rounds; ++r) {
      ++rounds;
      if (!round(theorems)) break;
    }
  }
};

ProofSession::ProofSession(Budget budget) : impl_(std::make_unique<Impl>(budget)) {}
ProofSession::~ProofSession() = default;
ProofSession::ProofSession(ProofSession&&) noexcept = default;
ProofSession& ProofSession::operator=(ProofSession&&) noexcept = default;

void ProofSession::assert_fact(const MathExp& literal) { impl_->assert_exp(literal); }

void ProofSession::intern(const MathExp& e) {
  if (e.is(Op::True) || e.is(Op::False)) return;
  if (e.sort().is_bool() && e.arity() > 0 && !e.is(Op::Var)) {
    for (const auto& c : e.children()) intern(c);
    return;
  }
  impl_->g.add(e);
}

void ProofSession::saturate(const std::vector<Theorem>& theorems) { impl_->saturate(theorems); }

bool ProofSession::holds(const MathExp& literal) { return impl_->holds(literal); }

bool ProofSession::decide_linear(const MathExp& literal) {
  if (!literal.is(Op::Le) && !literal.is(Op::Lt)) return impl_->holds(literal);
  auto a = impl_->g.add(literal.child(0));
  auto b = impl_->g.add(literal.child(1));
  return impl_->entails_le(a, b, literal.is(Op::Lt));
}

const EGraph& ProofSession::graph() const { return impl_->g; }
const std::vector<TraceStep>& ProofSession::trace() const { return impl_->trace; }
int ProofSession::rounds_run() const { return impl_->rounds; }

std::vector<std::string> ProofSession::fact_snapshot() const {
  const auto& g = impl_->g;
  std::vector<std::string> out;
  for (auto c : g.classes()) {
    const auto& ms = g.members(c);
    if (ms.size() < 2) continue;
    std::vector<std::string> names;
    for (auto m : ms) names.push_back(g.term(m).exp.render());
    std::sort(names.begin(), names.end());
    std::string line = "class:";
    for (const auto& n : names) line += " {" + n + "}";
    out.push_back(line);
  }
  for (const auto& f : impl_->facts)
    out.push_back(relation(f.op, impl_->display(f.a), impl_->display(f.b)).render());
  std::sort(out.begin(), out.end());
  return out;
}

ProofResult prove(const MathExp& goal, const std::vector<MathExp>& givens, const std::vector<Theorem>& theorems,
                  const Budget& budget) {
  const auto start = Clock::now();
  ProofResult result;
  try {
    ProofSession session(budget);
    for (const auto& g : givens) session.assert_fact(g);
    // Implication goals: the antecedent is a hypothesis, not a negated goal.
    MathExp target = goal;
    while (target.is(Op::Implies)) {
      session.assert_fact(target.child(0));
      target = target.child(1);
    }
    session.intern(target);
    session.saturate(theorems);
    if (session.holds(target)) {
      result.status = Status::Proved;
      result.trace = session.trace();
      result.trace.push_back(TraceStep{"goal", {}, goal.render()});
    }
  } catch (const ProofSession::TimedOut&) {
    result.status = Status::Timeout;
    result.trace.clear();
  }
  result.elapsed_ms =
      static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count());
  return result;
}

ProofResult prove_vc(const vc::VC& vc, const std::vector<Theorem>& theorems, const Budget& budget) {
  return prove(vc.goal, vc.givens, theorems, budget);
}

}  // namespace keel::prover
