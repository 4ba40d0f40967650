#include "keel/checker.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace keel::lang {

using math::MathExp;
using math::Op;
using math::Sort;

namespace {

constexpr const char* kIntegerConcept = "Integer_Template";

struct SortError {
  std::string message;
};

MathExp resolve(const MathExp& e, const SortEnv& env, const SortEnv* formals) {
  auto kids = [&](std::size_t i) { return resolve(e.child(i), env, formals); };
  auto need = [&](const MathExp& x, bool ok, const char* what) {
    if (!ok) throw SortError{"'" + x.render() + "' is not " + what};
  };
  switch (e.op()) {
    case Op::Var: {
      if (e.bound()) return e;
      if (e.incoming()) {
        if (!formals) throw SortError{"'#" + e.name() + "' may only appear in an ensures clause"};
        auto it = formals->find(e.name());
        if (it == formals->end()) throw SortError{"'#" + e.name() + "' does not name a parameter"};
        return math::with_sort(e, it->second);
      }
      auto it = env.find(e.name());
      if (it == env.end()) throw SortError{"unresolved name '" + e.name() + "'"};
      return math::with_sort(e, it->second);
    }
    case Op::True:
    case Op::False:
    case Op::IntLit:
    case Op::MinInt:
    case Op::MaxInt:
    case Op::Empty: return e;
    case Op::And:
    case Op::Implies: {
      auto a = kids(0), b = kids(1);
      need(a, a.sort().is_bool(), "boolean");
      need(b, b.sort().is_bool(), "boolean");
      return e.is(Op::And) ? math::mk_and(a, b) : math::mk_implies(a, b);
    }
    case Op::Not: {
      auto a = kids(0);
      need(a, a.sort().is_bool(), "boolean");
      return math::mk_not(a);
    }
    case Op::Eq:
    case Op::Neq: {
      auto a = kids(0), b = kids(1);
      if (!math::compatible(a.sort(), b.sort()))
        throw SortError{"sort mismatch: '" + a.render() + "' is " + a.sort().str() + " but '" + b.render() +
                        "' is " + b.sort().str()};
      return e.is(Op::Eq) ? math::mk_eq(a, b) : math::mk_neq(a, b);
    }
    case Op::Le:
    case Op::Lt:
    case Op::Add:
    case Op::Sub: {
      auto a = kids(0), b = kids(1);
      need(a, a.sort().is_int(), "an integer");
      need(b, b.sort().is_int(), "an integer");
      switch (e.op()) {
        case Op::Le: return math::mk_le(a, b);
        case Op::Lt: return math::mk_lt(a, b);
        case Op::Add: return math::mk_add(a, b);
        default: return math::mk_sub(a, b);
      }
    }
    case Op::Concat: {
      std::vector<MathExp> parts;
      Sort first;
      for (std::size_t i = 0; i < e.arity(); ++i) {
        auto p = kids(i);
        need(p, p.sort().is_str(), "a string");
        if (!parts.empty() && !math::compatible(first, p.sort()))
          throw SortError{"sort mismatch in concatenation at '" + p.render() + "'"};
        if (parts.empty()) first = p.sort();
        parts.push_back(p);
      }
      return math::mk_concat(std::move(parts));
    }
    case Op::Reverse: {
      auto a = kids(0);
      need(a, a.sort().is_str(), "a string");
      return math::mk_reverse(a);
    }
    case Op::Length: {
      auto a = kids(0);
      need(a, a.sort().is_str(), "a string");
      return math::mk_length(a);
    }
    case Op::Singleton: {
      auto a = kids(0);
      need(a, a.sort().is_entry(), "an entry");
      return math::mk_singleton(a);
    }
    case Op::Apply: throw SortError{"unknown function '" + e.name() + "'"};
  }
  throw SortError{"unsupported expression"};
}

std::optional<MathExp> initial_value(const Sort& s) {
  switch (s.kind) {
    case math::SortKind::Int: return math::mk_int(0);
    case math::SortKind::Bool: return math::mk_true();
    case math::SortKind::Str: return math::mk_empty(s.element);
    default: return std::nullopt;
  }
}

struct Scope {
  std::map<std::string, ProgramType> types;
  std::map<std::string, Sort> constants;
  std::vector<MathExp> constraints;
  std::map<std::string, ContractRef> contracts;
};

class Checker {
 public:
  explicit Checker(Diagnostics& diags) : diags_(diags) {}

  void error(std::string msg, int line, int col = 1) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(msg), line, col});
  }

  std::optional<MathExp> clause(const MathExp& e, const SortEnv& env, const SortEnv* formals, int line,
                                bool want_int = false) {
    auto r = resolve_sorts(e, env, formals, line);
    if (auto* d = std::get_if<Diagnostic>(&r)) {
      diags_.push_back(*d);
      return std::nullopt;
    }
    auto out = std::get<MathExp>(r);
    if (want_int && !out.sort().is_int()) {
      error("decreasing clause '" + out.render() + "' must be an integer", line);
      return std::nullopt;
    }
    if (!want_int && !out.sort().is_bool()) {
      error("clause '" + out.render() + "' must be boolean", line);
      return std::nullopt;
    }
    return out;
  }

  const ProgramType* type(const Scope& s, const std::string& name, int line) {
    auto it = s.types.find(name);
    if (it == s.types.end()) {
      error("unknown type '" + name + "'", line);
      return nullptr;
    }
    return &it->second;
  }

  ContractRef contract(const OperationDecl& op, const Scope& s, const std::string& owner) {
    auto c = std::make_shared<Contract>();
    c->name = op.name;
    c->owner = owner;
    c->line = op.line;
    SortEnv env = s.constants;
    SortEnv formal_sorts;
    std::set<std::string> seen;
    for (const auto& f : op.formals) {
      if (!seen.insert(f.name).second) error("duplicate parameter '" + f.name + "'", f.line);
      const auto* t = type(s, f.type, f.line);
      Sort srt = t ? t->model : Sort::unknown();
      c->formals.push_back(ResolvedFormal{f.mode, f.name, f.type, srt});
      env[f.name] = srt;
      formal_sorts[f.name] = srt;
    }
    if (op.result_type) {
      c->result_type = op.result_type;
      if (const auto* t = type(s, *op.result_type, op.line)) c->result_sort = t->model;
    }
    if (op.requires_clause) {
      c->requires_line = op.requires_clause->line;
      c->requires_clause = clause(op.requires_clause->exp, env, nullptr, op.requires_clause->line);
    }
    if (op.ensures_clause) {
      c->ensures_line = op.ensures_clause->line;
      SortEnv ens = env;
      if (c->result_type) ens[op.name] = c->result_sort;
      c->ensures_clause = clause(op.ensures_clause->exp, ens, &formal_sorts, op.ensures_clause->line);
    }
    return c;
  }

 private:
  Diagnostics& diags_;
};

void add_integer_scope(Scope& s, const Library& lib) {
  if (const auto* integer = lib.find(kIntegerConcept)) {
    for (const auto& [n, t] : integer->types) s.types.emplace(n, t);
    for (const auto& [n, c] : integer->operations) s.contracts.emplace(n, c);
  } else {
    s.types.emplace("Integer", ProgramType{"Integer", Sort::integer(), math::mk_int(0)});
    s.types.emplace("Boolean", ProgramType{"Boolean", Sort::boolean(), math::mk_true()});
  }
}

void add_spec_scope(Scope& s, const SpecInfo& spec) {
  for (const auto& [n, t] : spec.types) s.types.emplace(n, t);
  for (const auto& [n, c] : spec.operations) s.contracts.emplace(n, c);
  for (const auto& [n, srt] : spec.constants) s.constants.emplace(n, srt);
  for (const auto& c : spec.constraints) s.constraints.push_back(c);
}

// ------------------------------------------------------------- procedures

class ProcedureChecker {
 public:
  ProcedureChecker(Checker& ck, const Scope& scope, TypedProcedure& tp, const std::string& self_name)
      : ck_(ck), scope_(scope), tp_(tp), self_(self_name) {}

  void run() {
    const auto& decl = *tp_.decl;
    for (const auto& f : tp_.contract->formals) {
      tp_.var_types[f.name] = f.type;
      env_[f.name] = f.sort;
      formal_sorts_[f.name] = f.sort;
    }
    for (const auto& v : decl.vars) {
      const auto* t = ck_.type(scope_, v.type, v.line);
      for (const auto& n : v.names) {
        if (tp_.var_types.count(n)) ck_.error("duplicate variable '" + n + "'", v.line);
        tp_.var_types[n] = v.type;
        tp_.locals.push_back(n);
        env_[n] = t ? t->model : Sort::unknown();
      }
    }
    SortEnv formal_env = scope_.constants;
    for (const auto& f : tp_.contract->formals) formal_env[f.name] = f.sort;
    for (const auto& [n, srt] : scope_.constants) env_.emplace(n, srt);
    if (decl.decreasing) tp_.decreasing = ck_.clause(decl.decreasing->exp, formal_env, nullptr, decl.decreasing->line, true);
    if (decl.recursive && !decl.decreasing)
      ck_.error("recursive procedure '" + decl.name + "' needs a decreasing clause", decl.line);
    stmts(decl.body);
  }

 private:
  Checker& ck_;
  const Scope& scope_;
  TypedProcedure& tp_;
  std::string self_;
  SortEnv env_;
  SortEnv formal_sorts_;

  Sort var_sort(const std::string& name, int line, int col) {
    auto it = env_.find(name);
    if (it == env_.end()) {
      ck_.error("unresolved name '" + name + "'", line, col);
      return Sort::unknown();
    }
    return it->second;
  }

  ContractRef lookup(const std::string& name, int line, int col) {
    if (name == self_) {
      if (!tp_.decl->recursive) ck_.error("'" + name + "' calls itself but is not declared Recursive", line, col);
      return tp_.contract;
    }
    auto it = scope_.contracts.find(name);
    if (it == scope_.contracts.end()) {
      ck_.error("unresolved operation '" + name + "'", line, col);
      return nullptr;
    }
    return it->second;
  }

  Sort call(const ProgExp& e, bool want_result) {
    auto c = lookup(e.name, e.line, e.column);
    if (!c) return Sort::unknown();
    tp_.calls[&e] = c;
    if (e.args.size() != c->formals.size()) {
      ck_.error("'" + e.name + "' expects " + std::to_string(c->formals.size()) + " arguments but got " +
                    std::to_string(e.args.size()),
                e.line, e.column);
      return c->result_sort;
    }
    std::set<std::string> mutated;
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      const auto& a = e.args[i];
      const auto& f = c->formals[i];
      if (f.mode != Mode::Evaluates && a.kind != ProgExp::Kind::Var) {
        ck_.error("argument " + std::to_string(i + 1) + " of '" + e.name + "' is an expression but parameter '" +
                      f.name + "' has mode " + mode_name(f.mode) + " and needs a variable",
                  a.line, a.column);
        continue;
      }
      auto s = exp(a);
      if (!math::compatible(s, f.sort))
        ck_.error("argument " + std::to_string(i + 1) + " of '" + e.name + "' has sort " + s.str() + " but '" +
                      f.name + "' expects " + f.sort.str(),
                  a.line, a.column);
      if (a.kind == ProgExp::Kind::Var && f.mode != Mode::Evaluates && f.mode != Mode::Preserves &&
          !mutated.insert(a.name).second)
        ck_.error("variable '" + a.name + "' is passed more than once to '" + e.name + "'", a.line, a.column);
    }
    if (want_result && !c->result_type)
      ck_.error("operation '" + e.name + "' has no result and cannot be used in an expression", e.line, e.column);
    if (!want_result && c->result_type)
      ck_.error("function '" + e.name + "' used as a statement; its result would be discarded", e.line, e.column);
    return c->result_sort;
  }

  Sort arith(const ProgExp& e, const char* op) {
    auto a = exp(e.args[0]);
    auto b = exp(e.args[1]);
    if (!a.is_int() || !b.is_int()) ck_.error("operands of '" + std::string(op) + "' must be Integers", e.line, e.column);
    auto it = scope_.contracts.find(e.kind == ProgExp::Kind::Add ? "Sum" : "Difference");
    if (it == scope_.contracts.end())
      ck_.error("no contract available for '" + std::string(op) + "'", e.line, e.column);
    else
      tp_.calls[&e] = it->second;
    return Sort::integer();
  }

  Sort exp(const ProgExp& e) {
    switch (e.kind) {
      case ProgExp::Kind::Var: return var_sort(e.name, e.line, e.column);
      case ProgExp::Kind::IntLit: return Sort::integer();
      case ProgExp::Kind::Call: return call(e, true);
      case ProgExp::Kind::Add: return arith(e, "+");
      case ProgExp::Kind::Sub: return arith(e, "-");
      case ProgExp::Kind::Rel: {
        auto a = exp(e.args[0]);
        auto b = exp(e.args[1]);
        bool ordered = e.rel == Op::Le || e.rel == Op::Lt;
        if (ordered ? !(a.is_int() && b.is_int()) : !math::compatible(a, b))
          ck_.error("operands of comparison have incompatible sorts " + a.str() + " and " + b.str(), e.line, e.column);
        return Sort::boolean();
      }
    }
    return Sort::unknown();
  }

  void condition(const ProgExp& e) {
    auto s = exp(e);
    if (!s.is_bool() && s.kind != math::SortKind::Unknown) ck_.error("condition must be Boolean", e.line, e.column);
  }

  void collect_assigned(const std::vector<Stmt>& body, std::vector<std::string>& out) {
    auto add = [&](const std::string& n) {
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    };
    for (const auto& s : body) {
      std::visit(
          [&](const auto& st) {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, SwapStmt>) {
              add(st.left);
              add(st.right);
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
              add(st.target);
            } else if constexpr (std::is_same_v<T, CallStmt>) {
              auto it = tp_.calls.find(&st.call);
              if (it == tp_.calls.end()) return;
              for (std::size_t i = 0; i < st.call.args.size() && i < it->second->formals.size(); ++i)
                if (is_mutating(it->second->formals[i].mode) && st.call.args[i].kind == ProgExp::Kind::Var)
                  add(st.call.args[i].name);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
              collect_assigned(st.then_body, out);
              collect_assigned(st.else_body, out);
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
              collect_assigned(st.body, out);
            }
          },
          s.node);
    }
  }

  void stmts(const std::vector<Stmt>& body) {
    for (const auto& s : body) stmt(s);
  }

  void stmt(const Stmt& s) {
    std::visit(
        [&](const auto& st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, SwapStmt>) {
            auto a = var_sort(st.left, s.line, 1);
            auto b = var_sort(st.right, s.line, 1);
            if (!math::compatible(a, b)) ck_.error("cannot swap '" + st.left + "' with '" + st.right + "'", s.line);
            if (st.left == st.right) ck_.error("cannot swap '" + st.left + "' with itself", s.line);
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            auto t = var_sort(st.target, s.line, 1);
            auto v = exp(st.value);
            if (!math::compatible(t, v))
              ck_.error("cannot assign a value of sort " + v.str() + " to '" + st.target + "'", s.line);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            call(st.call, false);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            condition(st.condition);
            stmts(st.then_body);
            stmts(st.else_body);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            condition(st.condition);
            stmts(st.body);
            loop(st, s.line);
          }
        },
        s.node);
  }

  void loop(const WhileStmt& w, int line) {
    LoopSpec spec;
    if (w.maintaining) {
      spec.maintaining_line = w.maintaining->line;
      if (auto inv = ck_.clause(w.maintaining->exp, env_, &formal_sorts_, w.maintaining->line)) spec.invariant = *inv;
    } else {
      spec.maintaining_line = line;
      spec.invariant = math::mk_true();
    }
    if (!w.decreasing) {
      ck_.error("While loop needs a decreasing clause to state its termination obligation", line);
    } else {
      spec.decreasing_line = w.decreasing->line;
      spec.metric = ck_.clause(w.decreasing->exp, env_, &formal_sorts_, w.decreasing->line, true);
    }
    if (w.changing) {
      for (const auto& n : *w.changing) {
        if (!env_.count(n) || scope_.constants.count(n)) ck_.error("changing clause names unknown variable '" + n + "'", w.changing_line);
        else spec.changing.push_back(n);
      }
    } else {
      collect_assigned(w.body, spec.changing);
    }
    tp_.loops[&w] = std::move(spec);
  }
};

}  // namespace

std::variant<MathExp, Diagnostic> resolve_sorts(const MathExp& e, const SortEnv& env, const SortEnv* formals,
                                                int line) {
  try {
    return resolve(e, env, formals);
  } catch (const SortError& err) {
    return Diagnostic{Severity::Error, err.message, line, 1};
  }
}

// ---------------------------------------------------------------- library

Diagnostics Library::add(SourceModule m) {
  Diagnostics diags;
  Checker ck(diags);
  SpecInfo info;
  auto shared = std::make_shared<const SourceModule>(std::move(m));
  info.module = shared;
  const auto& mod = *shared;
  Scope scope;
  if (mod.name != kIntegerConcept) add_integer_scope(scope, *this);
  for (const auto& u : mod.uses) {
    if (const auto* spec = find(u)) add_spec_scope(scope, *spec);
    else ck.error("unknown module '" + u + "' in uses clause", mod.line);
  }

  if (mod.kind == ModuleKind::Concept) {
    for (const auto& p : mod.params) {
      if (p.is_type) {
        scope.types[p.name] = ProgramType{p.name, Sort::entry(p.name), std::nullopt};
      } else if (const auto* t = ck.type(scope, p.type, mod.line)) {
        scope.constants[p.name] = t->model;
      }
    }
    for (const auto& td : mod.types) {
      if (td.model.is_str() && !scope.types.count(td.model.element))
        ck.error("unknown entry type '" + td.model.element + "'", td.line);
      scope.types[td.name] = ProgramType{td.name, td.model, initial_value(td.model)};
    }
    for (const auto& c : mod.constraints)
      if (auto e = ck.clause(c.exp, scope.constants, nullptr, c.line)) scope.constraints.push_back(*e);
    for (const auto& op : mod.operations) {
      if (info.operations.count(op.name)) ck.error("duplicate operation '" + op.name + "'", op.line);
      info.operations[op.name] = ck.contract(op, scope, mod.name);
    }
  } else if (mod.kind == ModuleKind::Enhancement) {
    const auto* concept_spec = find(mod.concept_name);
    if (!concept_spec || concept_spec->module->kind != ModuleKind::Concept) {
      ck.error("enhancement '" + mod.name + "' extends unknown concept '" + mod.concept_name + "'", mod.line);
      return diags;
    }
    add_spec_scope(scope, *concept_spec);
    for (const auto& op : mod.operations) info.operations[op.name] = ck.contract(op, scope, mod.name);
  } else {
    return diags;
  }
  if (has_errors(diags)) return diags;
  for (const auto& [n, t] : scope.types) {
    // Integer_Template's own types are always in scope and need not be re-exported.
    if (mod.name == kIntegerConcept || !find(kIntegerConcept) || !find(kIntegerConcept)->types.count(n))
      info.types[n] = t;
  }
  info.constants = scope.constants;
  info.constraints = scope.constraints;
  if (!specs_.count(mod.name)) order_.push_back(mod.name);
  specs_[mod.name] = std::move(info);
  return diags;
}

const SpecInfo* Library::find(const std::string& name) const {
  auto it = specs_.find(name);
  return it == specs_.end() ? nullptr : &it->second;
}

std::vector<std::string> Library::names() const { return order_; }

// ----------------------------------------------------------- user modules

std::variant<TypedModule, Diagnostics> check_module(SourceModule source, const Library& library) {
  Diagnostics diags;
  Checker ck(diags);
  TypedModule tm;
  tm.module = std::make_shared<const SourceModule>(std::move(source));
  const auto& mod = *tm.module;

  Scope scope;
  add_integer_scope(scope, library);
  for (const auto& u : mod.uses) {
    if (const auto* spec = library.find(u)) add_spec_scope(scope, *spec);
    else ck.error("unknown module '" + u + "' in uses clause", mod.line);
  }

  auto finish = [&]() -> std::variant<TypedModule, Diagnostics> {
    if (has_errors(diags)) return diags;
    tm.types = scope.types;
    tm.contracts = scope.contracts;
    tm.constants = scope.constants;
    tm.constraints = scope.constraints;
    return std::move(tm);
  };

  switch (mod.kind) {
    case ModuleKind::Concept:
    case ModuleKind::Enhancement: {
      // Specifications carry no code; check them as a library entry would be.
      Library scratch = library;
      auto ds = scratch.add(mod);
      diags.insert(diags.end(), ds.begin(), ds.end());
      return finish();
    }
    case ModuleKind::Facility: {
      std::map<std::string, ContractRef> own;
      for (const auto& op : mod.operations) {
        if (own.count(op.name)) ck.error("duplicate operation '" + op.name + "'", op.line);
        own[op.name] = ck.contract(op, scope, mod.name);
      }
      for (const auto& [n, c] : own) scope.contracts[n] = c;
      for (std::size_t i = 0; i < mod.procedures.size(); ++i) {
        TypedProcedure tp;
        tp.decl = &mod.procedures[i];
        tp.contract = own.at(mod.operations[i].name);
        ProcedureChecker(ck, scope, tp, tp.decl->name).run();
        tm.procedures.push_back(std::move(tp));
      }
      return finish();
    }
    case ModuleKind::Realization: {
      const auto* enh = library.find(mod.enhancement_name);
      if (!enh || enh->module->kind != ModuleKind::Enhancement) {
        ck.error("unknown enhancement '" + mod.enhancement_name + "'", mod.line);
        return diags;
      }
      if (enh->module->concept_name != mod.concept_name) {
        ck.error("enhancement '" + mod.enhancement_name + "' extends '" + enh->module->concept_name + "', not '" +
                     mod.concept_name + "'",
                 mod.line);
        return diags;
      }
      const auto* concept_spec = library.find(mod.concept_name);
      if (concept_spec) add_spec_scope(scope, *concept_spec);
      for (const auto& [n, t] : enh->types) scope.types.emplace(n, t);
      for (const auto& proc : mod.procedures) {
        auto it = enh->operations.find(proc.name);
        if (it == enh->operations.end()) {
          ck.error("procedure '" + proc.name + "' implements no operation of '" + mod.enhancement_name + "'", proc.line);
          continue;
        }
        const auto& c = *it->second;
        bool same = c.formals.size() == proc.formals.size() && c.result_type == proc.result_type;
        for (std::size_t i = 0; same && i < proc.formals.size(); ++i)
          same = c.formals[i].mode == proc.formals[i].mode && c.formals[i].name == proc.formals[i].name &&
                 c.formals[i].type == proc.formals[i].type;
        if (!same) {
          ck.error("procedure '" + proc.name + "' does not match the parameters of its operation", proc.line);
          continue;
        }
        TypedProcedure tp;
        tp.decl = &proc;
        tp.contract = it->second;
        tp.contract_is_local = false;
        ProcedureChecker(ck, scope, tp, proc.name).run();
        tm.procedures.push_back(std::move(tp));
      }
      for (const auto& [n, cref] : enh->operations) scope.contracts.emplace(n, cref);
      return finish();
    }
  }
  return finish();
}

}  // namespace keel::lang
