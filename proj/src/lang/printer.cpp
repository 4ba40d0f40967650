#include "keel/parser.hpp"

#include <sstream>

namespace keel::lang {

namespace {

std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 4, ' '); }

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string print_formals(const std::vector<Formal>& fs) {
  std::vector<std::string> parts;
  for (const auto& f : fs) parts.push_back(std::string(mode_name(f.mode)) + " " + f.name + ": " + f.type);
  return "(" + join(parts, "; ") + ")";
}

std::string print_sort(const math::Sort& s) {
  if (s.is_str()) return "Str(" + s.element + ")";
  if (s.is_bool()) return "B";
  return "Z";
}

const char* rel_text(math::Op op) {
  switch (op) {
    case math::Op::Eq: return " = ";
    case math::Op::Neq: return " /= ";
    case math::Op::Le: return " <= ";
    default: return " < ";
  }
}

void print_stmts(std::ostringstream& out, const std::vector<Stmt>& stmts, int depth);

void print_stmt(std::ostringstream& out, const Stmt& s, int depth) {
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, SwapStmt>) {
          out << indent(depth) << st.left << " :=: " << st.right << ";\n";
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          out << indent(depth) << st.target << " := " << print_prog_exp(st.value) << ";\n";
        } else if constexpr (std::is_same_v<T, CallStmt>) {
          out << indent(depth) << print_prog_exp(st.call) << ";\n";
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          out << indent(depth) << "If " << print_prog_exp(st.condition) << " then\n";
          print_stmts(out, st.then_body, depth + 1);
          if (st.has_else) {
            out << indent(depth) << "else\n";
            print_stmts(out, st.else_body, depth + 1);
          }
          out << indent(depth) << "end;\n";
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          out << indent(depth) << "While " << print_prog_exp(st.condition) << "\n";
          if (st.changing) out << indent(depth + 1) << "changing " << join(*st.changing, ", ") << ";\n";
          if (st.maintaining) out << indent(depth + 1) << "maintaining " << st.maintaining->exp.render() << ";\n";
          if (st.decreasing) out << indent(depth + 1) << "decreasing " << st.decreasing->exp.render() << ";\n";
          out << indent(depth) << "do\n";
          print_stmts(out, st.body, depth + 1);
          out << indent(depth) << "end;\n";
        }
      },
      s.node);
}

void print_stmts(std::ostringstream& out, const std::vector<Stmt>& stmts, int depth) {
  for (const auto& s : stmts) print_stmt(out, s, depth);
}

void print_clauses(std::ostringstream& out, const OperationDecl& op, int depth) {
  if (op.requires_clause) out << indent(depth) << "requires " << op.requires_clause->exp.render() << ";\n";
  if (op.ensures_clause) out << indent(depth) << "ensures " << op.ensures_clause->exp.render() << ";\n";
}

void print_operation(std::ostringstream& out, const OperationDecl& op, int depth) {
  out << indent(depth) << "Operation " << op.name << print_formals(op.formals);
  if (op.result_type) out << ": " << *op.result_type;
  out << ";\n";
  print_clauses(out, op, depth + 1);
}

void print_proc_body(std::ostringstream& out, const ProcedureDecl& p, int depth) {
  if (p.decreasing) out << indent(depth) << "decreasing " << p.decreasing->exp.render() << ";\n";
  for (const auto& v : p.vars) out << indent(depth) << "Var " << join(v.names, ", ") << ": " << v.type << ";\n";
  print_stmts(out, p.body, depth);
}

}  // namespace

std::string print_prog_exp(const ProgExp& e) {
  switch (e.kind) {
    case ProgExp::Kind::Var: return e.name;
    case ProgExp::Kind::IntLit: return e.value.str();
    case ProgExp::Kind::Call: {
      std::vector<std::string> args;
      for (const auto& a : e.args) args.push_back(print_prog_exp(a));
      return e.name + "(" + join(args, ", ") + ")";
    }
    case ProgExp::Kind::Add:
    case ProgExp::Kind::Sub: {
      auto rhs = print_prog_exp(e.args[1]);
      if (e.args[1].kind == ProgExp::Kind::Add || e.args[1].kind == ProgExp::Kind::Sub) rhs = "(" + rhs + ")";
      return print_prog_exp(e.args[0]) + (e.kind == ProgExp::Kind::Add ? " + " : " - ") + rhs;
    }
    case ProgExp::Kind::Rel: return print_prog_exp(e.args[0]) + rel_text(e.rel) + print_prog_exp(e.args[1]);
  }
  return "?";
}

std::string print_module(const SourceModule& m) {
  std::ostringstream out;
  switch (m.kind) {
    case ModuleKind::Concept: {
      out << "Concept " << m.name;
      if (!m.params.empty()) {
        std::vector<std::string> ps;
        for (const auto& p : m.params) ps.push_back(p.is_type ? "type " + p.name : p.name + ": " + p.type);
        out << "(" << join(ps, "; ") << ")";
      }
      out << ";\n";
      break;
    }
    case ModuleKind::Enhancement: out << "Enhancement " << m.name << " for " << m.concept_name << ";\n"; break;
    case ModuleKind::Realization:
      out << "Realization " << m.name << " for " << m.enhancement_name << " of " << m.concept_name << ";\n";
      break;
    case ModuleKind::Facility: out << "Facility " << m.name << ";\n"; break;
  }
  if (!m.uses.empty()) out << indent(1) << "uses " << join(m.uses, ", ") << ";\n";
  for (const auto& t : m.types) out << indent(1) << "Type " << t.name << " is modeled by " << print_sort(t.model) << ";\n";
  for (const auto& c : m.constraints) out << indent(1) << "constraint " << c.exp.render() << ";\n";

  if (m.kind == ModuleKind::Facility) {
    for (std::size_t i = 0; i < m.operations.size(); ++i) {
      print_operation(out, m.operations[i], 1);
      out << indent(1) << "Procedure\n";
      print_proc_body(out, m.procedures[i], 2);
      out << indent(1) << "end " << m.procedures[i].name << ";\n";
    }
  } else {
    for (const auto& op : m.operations) print_operation(out, op, 1);
    for (const auto& p : m.procedures) {
      out << indent(1) << (p.recursive ? "Recursive Procedure " : "Procedure ") << p.name << print_formals(p.formals);
      if (p.result_type) out << ": " << *p.result_type;
      out << ";\n";
      print_proc_body(out, p, 2);
      out << indent(1) << "end " << p.name << ";\n";
    }
  }
  out << "end " << m.name << ";\n";
  return out.str();
}

}  // namespace keel::lang
