#include "keel/theory.hpp"

#include "keel/parser.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace keel::theory {

using math::MathExp;
using math::Op;
using math::Sort;

namespace {

constexpr std::string_view kStringTheory = R"(
-- Notation for strings over an entry type: o (concatenation), Reverse,
-- |s| (length), <e> (singleton), empty_string.

Theorem REV_CONCAT: For all u, v : Str,
    Reverse(u o v) = Reverse(v) o Reverse(u)
    triggers Reverse(u o v);

Theorem REV_SINGLETON: For all e : Entry,
    Reverse(<e>) = <e>
    triggers Reverse(<e>);

Theorem REV_EMPTY:
    Reverse(empty_string) = empty_string
    triggers Reverse(empty_string);

Theorem LEN_EMPTY:
    |empty_string| = 0
    triggers |empty_string|;

Theorem LEN_SINGLETON: For all e : Entry,
    |<e>| = 1
    triggers |<e>|;

Theorem LEN_CONCAT: For all u, v : Str,
    |u o v| = |u| + |v|
    triggers u o v;

Theorem LEN_REV: For all u : Str,
    |Reverse(u)| = |u|
    triggers |Reverse(u)|;

Theorem LEN_NONNEG: For all u : Str,
    0 <= |u|
    triggers |u|;

Theorem LEN_ZERO: For all u : Str,
    if |u| = 0 then u = empty_string
    triggers |u|;

Theorem CANCEL_L: For all u, v, w, x : Str,
    if |u| = |w| and u o v = w o x then u = w
    triggers u o v = w o x;

Theorem CANCEL_R: For all u, v, w, x : Str,
    if |u| = |w| and u o v = w o x then v = x
    triggers u o v = w o x;
)";

constexpr std::string_view kIntegerFacts = R"(
Theorem MININT_NEG:
    min_int <= 0
    triggers min_int;

Theorem MAXINT_POS:
    0 < max_int
    triggers max_int;

Theorem NONZERO_NAT: For all n : Z,
    if 0 <= n and n /= 0 then 1 <= n
    triggers n /= 0;
)";

bool is_literal_op(Op op) { return op == Op::Eq || op == Op::Neq || op == Op::Le || op == Op::Lt; }

void collect_bound(const MathExp& e, std::set<std::string>& out) {
  if (e.is(Op::Var) && e.bound()) out.insert(e.name());
  for (std::size_t i = 0; i < e.arity(); ++i) collect_bound(e.child(i), out);
}

class TheoryReader {
 public:
  explicit TheoryReader(std::vector<lang::Token> toks) : p_(std::move(toks)) {}

  std::vector<Theorem> run() {
    std::vector<Theorem> out;
    std::set<std::string> names;
    while (!p_.at_end()) {
      auto t = theorem();
      if (!names.insert(t.name).second) fail(t.line, "duplicate theorem '" + t.name + "'");
      out.push_back(std::move(t));
    }
    return out;
  }

 private:
  lang::Parser p_;

  [[noreturn]] void fail(int line, std::string msg) {
    throw FrontEndError{{Diagnostic{Severity::Error, std::move(msg), line, 1}}};
  }

  Sort sort() {
    const auto t = p_.peek();
    if (p_.accept_keyword("Reverse")) p_.fail(t, "expected a sort");
    auto name = p_.identifier("sort");
    if (name == "Z" || name == "Integer") return Sort::integer();
    if (name == "B" || name == "Boolean") return Sort::boolean();
    if (name == "Str" || name == "String") {
      if (p_.accept(lang::TokenKind::LParen)) {
        auto elem = p_.identifier("entry type");
        p_.expect(lang::TokenKind::RParen, "", "')'");
        return Sort::string_of(elem);
      }
      return Sort::string_of("");
    }
    if (name == "Entry") return Sort::entry("");
    return Sort::entry(name);
  }

  // True when the tokens ahead read `id {, id} :`.
  bool at_group() const {
    std::size_t k = 0;
    while (true) {
      if (!p_.peek(k).is(lang::TokenKind::Identifier)) return false;
      if (p_.peek(k + 1).is(lang::TokenKind::Colon)) return true;
      if (!p_.peek(k + 1).is(lang::TokenKind::Comma)) return false;
      k += 2;
    }
  }

  Theorem theorem() {
    Theorem th;
    th.line = p_.expect_keyword("Theorem").line;
    th.name = p_.identifier("theorem name");
    p_.expect(lang::TokenKind::Colon, "", "':'");
    if (p_.accept_keyword("For")) p_.expect_keyword("all");

    math::Bindings binds;
    std::set<std::string> seen;
    while (at_group()) {
      std::vector<std::string> names;
      do {
        names.push_back(p_.identifier("variable"));
      } while (p_.accept(lang::TokenKind::Comma));
      p_.expect(lang::TokenKind::Colon, "", "':'");
      auto s = sort();
      for (const auto& n : names) {
        if (!seen.insert(n).second) fail(th.line, "variable '" + n + "' quantified twice in " + th.name);
        auto b = math::mk_bound(n, s);
        th.universals.push_back(b);
        binds[math::VarKey{n, 0, false, false}] = b;
      }
      if (!p_.accept(lang::TokenKind::Comma)) break;
    }

    auto bind = [&](const MathExp& raw, int line) {
      auto r = lang::resolve_sorts(math::substitute(raw, binds), {}, nullptr, line);
      if (auto* d = std::get_if<Diagnostic>(&r)) fail(line, th.name + ": " + d->message);
      return std::get<MathExp>(r);
    };

    const int body_line = p_.peek().line;
    if (p_.accept_keyword("if")) {
      th.hypothesis = bind(p_.assertion(), body_line);
      p_.expect_keyword("then");
      for (const auto& h : math::split_conjuncts(*th.hypothesis))
        if (!is_literal_op(h.op())) fail(body_line, th.name + ": hypothesis must be a conjunction of literals");
    }
    const int concl_line = p_.peek().line;
    th.conclusion = bind(p_.assertion(), concl_line);
    if (!is_literal_op(th.conclusion.op()))
      fail(concl_line, th.name + ": conclusion must be a single equality or relation");

    if (!p_.accept_keyword("triggers")) fail(p_.peek().line, th.name + ": missing triggers clause");
    do {
      const int tl = p_.peek().line;
      auto pat = bind(p_.assertion(), tl);
      if (pat.is(Op::Var)) fail(tl, th.name + ": a bare variable cannot serve as a trigger");
      th.triggers.push_back(pat);
    } while (p_.accept(lang::TokenKind::Comma));
    p_.expect(lang::TokenKind::Semicolon, "", "';'");

    if (auto gap = trigger_gap(th)) fail(th.line, *gap);
    return th;
  }
};

std::vector<Theorem> must_parse(std::string_view text) {
  auto r = parse_theory(text);
  if (auto* d = std::get_if<Diagnostics>(&r)) {
    std::string msg = "built-in theory failed to load:";
    for (const auto& x : *d) msg += " " + x.str();
    throw std::logic_error(msg);
  }
  return std::get<std::vector<Theorem>>(std::move(r));
}

std::string sort_text(const Sort& s) {
  if (s.is_str() && s.element.empty()) return "Str";
  if (s.is_entry() && s.element.empty()) return "Entry";
  return s.str();
}

}  // namespace

std::string render(const Theorem& t) {
  std::ostringstream out;
  out << "Theorem " << t.name << ":";
  if (!t.universals.empty()) {
    out << " For all";
    for (std::size_t i = 0; i < t.universals.size(); ++i)
      out << (i ? ", " : " ") << t.universals[i].name() << " : " << sort_text(t.universals[i].sort());
    out << ",";
  }
  if (t.hypothesis) out << " if " << t.hypothesis->render() << " then";
  out << " " << t.conclusion.render() << " triggers ";
  for (std::size_t i = 0; i < t.triggers.size(); ++i) out << (i ? ", " : "") << t.triggers[i].render();
  out << ";";
  return out.str();
}

std::optional<std::string> trigger_gap(const Theorem& t) {
  for (const auto& trig : t.triggers) {
    std::set<std::string> covered;
    collect_bound(trig, covered);
    for (const auto& u : t.universals)
      if (!covered.count(u.name()))
        return t.name + ": trigger '" + trig.render() + "' does not bind '" + u.name() + "'";
  }
  if (t.triggers.empty()) return t.name + ": no triggers";
  return std::nullopt;
}

std::variant<std::vector<Theorem>, Diagnostics> parse_theory(std::string_view text) {
  auto toks = lang::tokenize(text);
  if (auto* d = std::get_if<Diagnostics>(&toks)) return std::move(*d);
  try {
    return TheoryReader(std::get<std::vector<lang::Token>>(std::move(toks))).run();
  } catch (FrontEndError& e) {
    return std::move(e.diagnostics);
  }
}

const std::vector<Theorem>& builtin_string_theory() {
  static const auto theorems = must_parse(kStringTheory);
  return theorems;
}

const std::vector<Theorem>& builtin_integer_facts() {
  static const auto theorems = must_parse(kIntegerFacts);
  return theorems;
}

std::vector<Theorem> builtin_theorems() {
  auto all = builtin_string_theory();
  const auto& ints = builtin_integer_facts();
  all.insert(all.end(), ints.begin(), ints.end());
  return all;
}

std::variant<std::vector<Theorem>, Diagnostics> load_theories(const std::string& dir, bool with_builtins) {
  namespace fs = std::filesystem;
  std::vector<Theorem> all = with_builtins ? builtin_theorems() : std::vector<Theorem>{};
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return Diagnostics{{Severity::Error, "theory directory not found: " + dir, 0, 0}};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".thy") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  Diagnostics diags;
  std::set<std::string> names;
  for (const auto& t : all) names.insert(t.name);
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    auto r = parse_theory(buf.str());
    if (auto* d = std::get_if<Diagnostics>(&r)) {
      for (auto x : *d) {
        x.message = f.filename().string() + ": " + x.message;
        diags.push_back(std::move(x));
      }
      continue;
    }
    for (auto& t : std::get<std::vector<Theorem>>(r)) {
      if (!names.insert(t.name).second) {
        diags.push_back({Severity::Error, f.filename().string() + ": theorem '" + t.name + "' is already defined", t.line, 1});
        continue;
      }
      all.push_back(std::move(t));
    }
  }
  if (has_errors(diags)) return diags;
  return all;
}

}  // namespace keel::theory
