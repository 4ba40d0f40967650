#include "keel/vc.hpp"

#include "keel/parser.hpp"
#include "keel/value_state.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace keel::vc {

using lang::ContractRef;
using lang::Mode;
using lang::ProgExp;
using lang::Stmt;
using lang::WhileStmt;
using math::MathExp;
using math::Op;

const char* kind_name(VcKind k) {
  switch (k) {
    case VcKind::OperationPrecondition: return "operation-precondition";
    case VcKind::LoopInvariantBase: return "loop-invariant-base";
    case VcKind::LoopInvariantPreservation: return "loop-invariant-preservation";
    case VcKind::TerminationProgress: return "termination-progress";
    case VcKind::TerminationBound: return "termination-bound";
    case VcKind::ProcedureEnsures: return "procedure-ensures";
    case VcKind::RestoresObligation: return "restores-obligation";
  }
  return "?";
}

namespace {

struct Path {
  math::ValueState state;
  std::vector<MathExp> givens;
  std::map<std::string, int> results;  // fresh names for function values
  int block = 0;
};

struct Frame {
  explicit Frame(const std::vector<Stmt>* s, const WhileStmt* l = nullptr) : stmts(s), loop(l) {}
  const std::vector<Stmt>* stmts;
  std::size_t next = 0;
  const WhileStmt* loop;  // set on a loop body: ends the path
  std::optional<MathExp> m0;  // metric on entry to the body
};

using Stack = std::vector<Frame>;

class Generator {
 public:
  Generator(const lang::TypedModule& mod, std::vector<VC>& out, int& next_block)
      : mod_(mod), out_(out), next_block_(next_block) {}

  void procedure(const lang::TypedProcedure& tp) {
    tp_ = &tp;
    const auto& c = *tp.contract;
    Path p;
    p.block = next_block_++;
    for (const auto& f : c.formals) p.state.declare(f.name, f.sort);
    if (c.requires_clause) assume(p, *c.requires_clause);
    for (const auto& k : mod_.constraints) assume(p, k);
    for (const auto& f : c.formals) range(p, p.state.current(f.name));
    for (const auto& local : tp.locals) {
      const auto& type = mod_.types.at(tp.var_types.at(local));
      p.state.declare(local, type.model);
      if (type.initial) assume(p, math::mk_eq(p.state.current(local), *type.initial));
    }
    walk(std::move(p), Stack{Frame(&tp.decl->body)});
  }

 private:
  const lang::TypedModule& mod_;
  std::vector<VC>& out_;
  int& next_block_;
  const lang::TypedProcedure* tp_ = nullptr;
  std::map<int, int> seq_;
  std::map<const WhileStmt*, std::pair<int, int>> loop_blocks_;

  // ------------------------------------------------------------- helpers

  MathExp instantiate(const MathExp& e, const Path& p) const {
    math::Bindings b;
    for (const auto& k : math::free_vars(e)) {
      if (!p.state.contains(k.name) || k.level != 0) continue;
      b[k] = k.incoming ? p.state.entry(k.name) : p.state.current(k.name);
    }
    return math::substitute(e, b);
  }

  void assume(Path& p, const MathExp& e) {
    for (auto& c : math::split_conjuncts(e)) {
      if (c.is(Op::True)) continue;
      if (std::find(p.givens.begin(), p.givens.end(), c) != p.givens.end()) continue;
      p.givens.push_back(std::move(c));
    }
  }

  void range(Path& p, const MathExp& v) {
    if (!v.sort().is_int()) return;
    assume(p, math::mk_le(math::mk_min_int(), v));
    assume(p, math::mk_le(v, math::mk_max_int()));
  }

  void emit(const Path& p, VcKind kind, MathExp goal, int line, std::string description) {
    VC vc;
    vc.block = p.block;
    vc.seq = ++seq_[p.block];
    vc.id = std::to_string(vc.block) + "_" + std::to_string(vc.seq);
    vc.line = line;
    vc.kind = kind;
    vc.goal = std::move(goal);
    vc.givens = p.givens;
    vc.description = std::move(description);
    vc.procedure = tp_->decl->name;
    out_.push_back(std::move(vc));
  }

  static bool is_result_def(const MathExp& conj, const std::string& name) {
    return conj.is(Op::Eq) && conj.child(0).is(Op::Var) && !conj.child(0).incoming() && conj.child(0).level() == 0 &&
           conj.child(0).name() == name;
  }

  // ---------------------------------------------------------- expressions

  MathExp eval(Path& p, const ProgExp& e) {
    switch (e.kind) {
      case ProgExp::Kind::Var: return p.state.current(e.name);
      case ProgExp::Kind::IntLit: return math::mk_int(e.value);
      case ProgExp::Kind::Add:
      case ProgExp::Kind::Sub:
      case ProgExp::Kind::Call: return *call(p, e);
      case ProgExp::Kind::Rel: {
        auto a = eval(p, e.args[0]);
        auto b = eval(p, e.args[1]);
        switch (e.rel) {
          case Op::Eq: return math::mk_eq(a, b);
          case Op::Neq: return math::mk_neq(a, b);
          case Op::Le: return math::mk_le(a, b);
          default: return math::mk_lt(a, b);
        }
      }
    }
    return math::mk_true();
  }

  // Applies the callee's contract at a call site; returns the function value.
  std::optional<MathExp> call(Path& p, const ProgExp& e) {
    const ContractRef& cref = tp_->calls.at(&e);
    const auto& c = *cref;
    std::vector<MathExp> pre;
    for (std::size_t i = 0; i < c.formals.size(); ++i)
      pre.push_back(c.formals[i].mode == Mode::Evaluates ? eval(p, e.args[i]) : p.state.current(e.args[i].name));

    math::Bindings in;
    for (std::size_t i = 0; i < c.formals.size(); ++i) in[{c.formals[i].name, 0, false, false}] = pre[i];
    const std::string site = lang::print_prog_exp(e);
    if (c.requires_clause) {
      for (const auto& conj : math::split_conjuncts(math::substitute(*c.requires_clause, in))) {
        if (conj.is(Op::True)) continue;
        emit(p, VcKind::OperationPrecondition, conj, e.line, "Requires clause of " + c.name + " for " + site);
      }
    }
    if (cref == tp_->contract && tp_->decreasing) {
      auto now = math::substitute(*tp_->decreasing, in);
      emit(p, VcKind::TerminationProgress, math::mk_lt(now, *tp_->decreasing), e.line,
           "Termination: recursive call " + site + " decreases " + tp_->decreasing->render());
    }

    math::Bindings out;
    for (std::size_t i = 0; i < c.formals.size(); ++i) {
      const auto& f = c.formals[i];
      MathExp post = pre[i];
      if (lang::is_mutating(f.mode)) {
        post = p.state.advance(e.args[i].name);
        range(p, post);
        if (f.mode == Mode::Clears) {
          const auto& type = mod_.types.at(f.type);
          if (type.initial) {
            auto init = type.initial->is(Op::Empty) ? math::mk_empty(post.sort().element) : *type.initial;
            assume(p, math::mk_eq(post, init));
          }
        }
      }
      out[{f.name, 0, false, false}] = post;
      out[{f.name, 0, true, false}] = pre[i];
    }

    std::optional<MathExp> value;
    std::vector<MathExp> conjuncts;
    if (c.ensures_clause) conjuncts = math::split_conjuncts(*c.ensures_clause);
    if (c.result_type) {
      for (auto it = conjuncts.begin(); it != conjuncts.end(); ++it) {
        if (is_result_def(*it, c.name)) {
          value = math::substitute(it->child(1), out);
          conjuncts.erase(it);
          break;
        }
      }
      if (!value) {
        value = math::mk_var(c.name, c.result_sort, ++p.results[c.name]);
        range(p, *value);
      }
      out[{c.name, 0, false, false}] = *value;
    }
    for (const auto& conj : conjuncts) assume(p, math::substitute(conj, out));
    return value;
  }

  // ----------------------------------------------------------- statements

  void walk(Path p, Stack stack) {
    while (!stack.empty()) {
      auto& top = stack.back();
      if (top.next == top.stmts->size()) {
        if (top.loop) {
          finish_body(p, top);
          return;
        }
        stack.pop_back();
        continue;
      }
      const Stmt& s = (*top.stmts)[top.next++];
      if (const auto* sw = std::get_if<lang::SwapStmt>(&s.node)) {
        auto a = p.state.current(sw->left), b = p.state.current(sw->right);
        auto a1 = p.state.advance(sw->left), b1 = p.state.advance(sw->right);
        assume(p, math::mk_eq(a1, b));
        assume(p, math::mk_eq(b1, a));
      } else if (const auto* as = std::get_if<lang::AssignStmt>(&s.node)) {
        auto v = eval(p, as->value);
        auto t = p.state.advance(as->target);
        assume(p, math::mk_eq(t, v));
        range(p, t);
      } else if (const auto* cs = std::get_if<lang::CallStmt>(&s.node)) {
        call(p, cs->call);
      } else if (const auto* is = std::get_if<lang::IfStmt>(&s.node)) {
        auto cond = eval(p, is->condition);
        Path then_path = p;
        assume(then_path, cond);
        Stack then_stack = stack;
        then_stack.push_back(Frame(&is->then_body));
        walk(std::move(then_path), std::move(then_stack));
        assume(p, math::negate(cond));
        stack.push_back(Frame(&is->else_body));
      } else if (const auto* ws = std::get_if<WhileStmt>(&s.node)) {
        loop(p, stack, *ws);
        return;
      }
    }
    finish(p);
  }

  void loop(const Path& p, const Stack& stack, const WhileStmt& w) {
    const auto& spec = tp_->loops.at(&w);
    auto [it, fresh] = loop_blocks_.try_emplace(&w, 0, 0);
    if (fresh) {
      it->second.first = next_block_++;
      it->second.second = next_block_++;
    }
    const auto [body_block, exit_block] = it->second;

    for (const auto& conj : math::split_conjuncts(instantiate(spec.invariant, p)))
      emit(p, VcKind::LoopInvariantBase, conj, spec.maintaining_line, "Base case of loop invariant");

    auto enter = [&](Path& q, int block) {
      q.block = block;
      for (const auto& v : spec.changing) range(q, q.state.advance(v));
      assume(q, instantiate(spec.invariant, q));
      return eval(q, w.condition);
    };

    Path body = p;
    assume(body, enter(body, body_block));
    Frame f(&w.body, &w);
    if (spec.metric) f.m0 = instantiate(*spec.metric, body);
    walk(std::move(body), Stack{f});

    Path exit = p;
    auto cond = enter(exit, exit_block);
    assume(exit, math::negate(cond));
    walk(std::move(exit), stack);
  }

  void finish_body(const Path& p, const Frame& f) {
    const auto& spec = tp_->loops.at(f.loop);
    for (const auto& conj : math::split_conjuncts(instantiate(spec.invariant, p)))
      emit(p, VcKind::LoopInvariantPreservation, conj, spec.maintaining_line, "Inductive case of loop invariant");
    if (spec.metric && f.m0) {
      auto m = instantiate(*spec.metric, p);
      emit(p, VcKind::TerminationProgress, math::mk_lt(m, *f.m0), spec.decreasing_line,
           "Termination: " + spec.metric->render() + " decreases each iteration");
      emit(p, VcKind::TerminationBound, math::mk_le(math::mk_int(0), m), spec.decreasing_line,
           "Termination: " + spec.metric->render() + " stays nonnegative");
    }
  }

  void finish(const Path& p) {
    const auto& c = *tp_->contract;
    const int line = tp_->contract_is_local && c.ensures_line ? c.ensures_line : tp_->decl->line;
    std::vector<MathExp> ensures;
    if (c.ensures_clause) ensures = math::split_conjuncts(*c.ensures_clause);
    for (const auto& conj : ensures)
      emit(p, VcKind::ProcedureEnsures, instantiate(conj, p), line, "Ensures clause of " + c.name);
    for (const auto& f : c.formals) {
      if (f.mode != Mode::Restores) continue;
      auto self = math::mk_var(f.name, f.sort), old = math::mk_incoming(f.name, f.sort);
      bool stated = std::any_of(ensures.begin(), ensures.end(), [&](const MathExp& e) {
        return e == math::mk_eq(self, old) || e == math::mk_eq(old, self);
      });
      if (stated) continue;
      emit(p, VcKind::RestoresObligation, math::mk_eq(p.state.current(f.name), p.state.entry(f.name)), tp_->decl->line,
           "Restores parameter " + f.name);
    }
  }
};

void symbols(const MathExp& e, std::set<math::VarKey>& out) {
  for (const auto& k : math::free_vars(e)) out.insert(k);
}

}  // namespace

std::vector<VC> generate_vcs(const lang::TypedModule& module) {
  std::vector<VC> out;
  int next_block = 0;
  Generator gen(module, out, next_block);
  for (const auto& tp : module.procedures) gen.procedure(tp);
  return out;
}

std::vector<bool> relevant_givens(const VC& vc) {
  std::set<math::VarKey> reach;
  symbols(vc.goal, reach);
  std::vector<std::set<math::VarKey>> given_syms(vc.givens.size());
  for (std::size_t i = 0; i < vc.givens.size(); ++i) symbols(vc.givens[i], given_syms[i]);
  std::vector<bool> keep(vc.givens.size(), false);
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < vc.givens.size(); ++i) {
      if (keep[i]) continue;
      bool touches = std::any_of(given_syms[i].begin(), given_syms[i].end(),
                                 [&](const math::VarKey& k) { return reach.count(k) != 0; });
      if (!touches) continue;
      keep[i] = grew = true;
      reach.insert(given_syms[i].begin(), given_syms[i].end());
    }
  }
  return keep;
}

std::string dump(const VC& vc) {
  std::ostringstream out;
  out << "VC " << vc.id << "  [" << kind_name(vc.kind) << "]  line " << vc.line << "\n";
  out << "  " << vc.description << "\n";
  out << "  Goal:\n    " << vc.goal.render() << "\n";
  out << "  Given:\n";
  if (vc.givens.empty()) out << "    (none)\n";
  auto keep = relevant_givens(vc);
  for (std::size_t i = 0; i < vc.givens.size(); ++i)
    if (keep[i]) out << "    " << i + 1 << ": " << vc.givens[i].render() << "\n";
  if (std::count(keep.begin(), keep.end(), false) > 0) {
    out << "    --\n";
    for (std::size_t i = 0; i < vc.givens.size(); ++i)
      if (!keep[i]) out << "    " << i + 1 << ": " << vc.givens[i].render() << "\n";
  }
  return out.str();
}

std::string dump(const std::vector<VC>& vcs) {
  std::string out;
  for (std::size_t i = 0; i < vcs.size(); ++i) {
    if (i) out += "\n";
    out += dump(vcs[i]);
  }
  return out;
}

}  // namespace keel::vc
