#include "lpm/syntax.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace lpm {

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok {
  Ident, Bang, Lambda, Colon, Dot, Arrow, LongArrow, LParen, RParen,
  LBracket, RBracket, Comma, Turnstile, End,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Bang: return "'!'";
    case Tok::Lambda: return "'\\'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'->'";
    case Tok::LongArrow: return "'-->'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Turnstile: return "'|-'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

struct Lexer {
  const std::string& src;
  std::string file;
  size_t pos = 0;
  int line = 1, col = 1;

  Lexer(const std::string& s, std::string f) : src(s), file(std::move(f)) {}

  void advance(char c) {
    ++pos;
    if (c == '\n') { ++line; col = 1; } else { ++col; }
  }

  Result<Token> next() {
    for (;;) {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
        advance(src[pos]);
      if (pos < src.size() && src[pos] == '#') {
        while (pos < src.size() && src[pos] != '\n') advance(src[pos]);
        continue;
      }
      break;
    }
    SourceSpan sp{file, line, col, line, col};
    if (pos >= src.size()) return Token{Tok::End, "", sp};
    char c = src[pos];
    auto one = [&](Tok k) {
      advance(c);
      sp.end_col = col;
      return Token{k, std::string(1, c), sp};
    };
    switch (c) {
      case '!': return one(Tok::Bang);
      case '\\': return one(Tok::Lambda);
      case ':': return one(Tok::Colon);
      case '.': return one(Tok::Dot);
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case '[': return one(Tok::LBracket);
      case ']': return one(Tok::RBracket);
      case ',': return one(Tok::Comma);
      case '|':
        if (pos + 1 < src.size() && src[pos + 1] == '-') {
          advance('|'); advance('-');
          sp.end_col = col;
          return Token{Tok::Turnstile, "|-", sp};
        }
        return Diag(DiagCode::ParseError, "stray '|'", sp);
      case '-':
        if (pos + 2 < src.size() && src[pos + 1] == '-' && src[pos + 2] == '>') {
          advance('-'); advance('-'); advance('>');
          sp.end_col = col;
          return Token{Tok::LongArrow, "-->", sp};
        }
        if (pos + 1 < src.size() && src[pos + 1] == '>') {
          advance('-'); advance('>');
          sp.end_col = col;
          return Token{Tok::Arrow, "->", sp};
        }
        return Diag(DiagCode::ParseError, "stray '-'", sp);
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string text;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        text += src[pos];
        advance(src[pos]);
      }
      sp.end_col = col;
      return Token{Tok::Ident, std::move(text), sp};
    }
    return Diag(DiagCode::ParseError,
                "unexpected character '" + std::string(1, c) + "'", sp);
  }
};

// --------------------------------------------------------------- parser

struct Parser {
  Lexer lex;
  Token tok{Tok::End, "", {}};
  std::optional<Diag> pending;
  std::vector<std::string> scope;  // binder names, innermost last

  Parser(const std::string& src, const std::string& file) : lex(src, file) { bump(); }

  void bump() {
    auto r = lex.next();
    if (!r) {
      pending = r.error();
      tok = Token{Tok::End, "", r.error().span.value_or(SourceSpan{})};
    } else {
      tok = std::move(r).take();
    }
  }

  Diag err(const std::string& msg) {
    if (pending) return *pending;
    return Diag(DiagCode::ParseError, msg + ", found " + tok_name(tok.kind) +
                                          (tok.kind == Tok::Ident ? " '" + tok.text + "'" : ""),
                tok.span);
  }

  Check expect(Tok k, const std::string& what) {
    if (pending) return *pending;
    if (tok.kind != k) return err("expected " + std::string(tok_name(k)) + " " + what);
    bump();
    return Ok{};
  }

  bool at(Tok k) const { return !pending && tok.kind == k; }

  // term := '!' IDENT ':' annot '.' term | '\' ... | arrow
  Result<TermPtr> term() {
    if (at(Tok::Bang) || at(Tok::Lambda)) {
      bool pi = tok.kind == Tok::Bang;
      bump();
      if (!at(Tok::Ident)) return err("expected a binder name");
      std::string name = tok.text;
      bump();
      auto c = expect(Tok::Colon, "after the binder name");
      if (!c) return c.error();
      auto ann = arrow();
      if (!ann) return ann;
      auto d = expect(Tok::Dot, "after the binder annotation");
      if (!d) return d.error();
      scope.push_back(name);
      auto body = term();
      scope.pop_back();
      if (!body) return body;
      return pi ? mk_pi(ann.value(), body.value(), name)
                : mk_lam(ann.value(), body.value(), name);
    }
    return arrow();
  }

  // arrow := app ('->' term)?
  Result<TermPtr> arrow() {
    auto lhs = app();
    if (!lhs) return lhs;
    if (at(Tok::Arrow)) {
      bump();
      scope.push_back("");  // anonymous binder
      auto rhs = term();
      scope.pop_back();
      if (!rhs) return rhs;
      // the codomain was parsed under an extra anonymous binder it never
      // mentions, so indices are already correct for a product
      return mk_pi(lhs.value(), rhs.value(), "");
    }
    return lhs;
  }

  Result<TermPtr> app() {
    auto head = atom();
    if (!head) return head;
    TermPtr out = std::move(head).take();
    while (at(Tok::Ident) || at(Tok::LParen)) {
      auto arg = atom();
      if (!arg) return arg;
      out = mk_app(out, arg.value());
    }
    return out;
  }

  Result<TermPtr> atom() {
    if (at(Tok::LParen)) {
      bump();
      auto t = term();
      if (!t) return t;
      auto c = expect(Tok::RParen, "to close the parenthesis");
      if (!c) return c.error();
      return t;
    }
    if (at(Tok::Ident)) {
      std::string name = tok.text;
      bump();
      if (name == "Type") return mk_lpm_type();
      if (name == "Kind") return mk_lpm_kind();
      for (int i = static_cast<int>(scope.size()) - 1; i >= 0; --i)
        if (scope[i] == name) return mk_var(static_cast<int>(scope.size()) - 1 - i);
      return mk_const(name);
    }
    return err("expected a term");
  }

  // entry := IDENT ':' term ; entries extend the scope left to right
  Result<Context> context_entries(Tok terminator) {
    Context ctx;
    if (at(terminator)) return ctx;
    for (;;) {
      if (!at(Tok::Ident)) return err("expected a context entry name");
      std::string name = tok.text;
      bump();
      auto c = expect(Tok::Colon, "after the context entry name");
      if (!c) return c.error();
      auto ty = term();
      if (!ty) return ty.error();
      ctx.push_back({name, ty.value()});
      scope.push_back(name);
      if (at(Tok::Comma)) { bump(); continue; }
      break;
    }
    return ctx;
  }
};

struct Statement {
  enum class Kind { Decl, Rule, Judgment } kind;
  // decl
  std::string name;
  TermPtr type;
  // rule / judgment
  Context ctx;
  TermPtr lhs, rhs;  // judgment: lhs = subject, rhs = type (may be null)
  SourceSpan span;
};

Result<std::vector<Statement>> parse_statements(const std::string& src,
                                                const std::string& file) {
  Parser p(src, file);
  std::vector<Statement> out;
  while (!p.at(Tok::End)) {
    if (p.pending) return *p.pending;
    Statement st;
    st.span = p.tok.span;
    if (p.at(Tok::Ident)) {
      st.kind = Statement::Kind::Decl;
      st.name = p.tok.text;
      p.bump();
      auto c = p.expect(Tok::Colon, "after the declaration name");
      if (!c) return c.error();
      auto ty = p.term();
      if (!ty) return ty.error();
      st.type = ty.value();
    } else if (p.at(Tok::LBracket)) {
      p.bump();
      auto ctx = p.context_entries(Tok::RBracket);
      if (!ctx) return ctx.error();
      st.ctx = ctx.value();
      auto rb = p.expect(Tok::RBracket, "to close the context");
      if (!rb) { p.scope.clear(); return rb.error(); }
      if (p.at(Tok::Turnstile)) {
        st.kind = Statement::Kind::Judgment;
        p.bump();
        auto subj = p.term();
        if (!subj) { p.scope.clear(); return subj.error(); }
        st.lhs = subj.value();
        if (p.at(Tok::Colon)) {
          p.bump();
          auto ty = p.term();
          if (!ty) { p.scope.clear(); return ty.error(); }
          st.rhs = ty.value();
        }
      } else {
        st.kind = Statement::Kind::Rule;
        auto lhs = p.term();
        if (!lhs) { p.scope.clear(); return lhs.error(); }
        st.lhs = lhs.value();
        auto la = p.expect(Tok::LongArrow, "between the rule sides");
        if (!la) { p.scope.clear(); return la.error(); }
        auto rhs = p.term();
        if (!rhs) { p.scope.clear(); return rhs.error(); }
        auto co = p.expect(Tok::Colon, "before the rule type");
        if (!co) { p.scope.clear(); return co.error(); }
        auto ty = p.term();
        if (!ty) { p.scope.clear(); return ty.error(); }
        st.rhs = rhs.value();
        st.type = ty.value();
      }
      p.scope.clear();
    } else {
      return p.err("expected a declaration, rule, or judgment");
    }
    auto dot = p.expect(Tok::Dot, "to end the statement");
    if (!dot) return dot.error();
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace

Result<TermPtr> parse_term(const std::string& src, const std::string& filename) {
  return parse_term_in(src, {}, filename);
}

Result<TermPtr> parse_term_in(const std::string& src,
                              const std::vector<std::string>& scope,
                              const std::string& filename) {
  Parser p(src, filename);
  p.scope = scope;
  auto t = p.term();
  if (!t) return t;
  if (!p.at(Tok::End)) return p.err("trailing input after the term");
  return t;
}

Result<Context> parse_context(const std::string& src, const std::string& filename) {
  Parser p(src, filename);
  auto ctx = p.context_entries(Tok::End);
  if (!ctx) return ctx;
  if (!p.at(Tok::End)) return p.err("trailing input after the context");
  return ctx;
}

Result<SigFile> parse_signature(const std::string& src, const std::string& filename) {
  auto sts = parse_statements(src, filename);
  if (!sts) return sts.error();
  SigFile out;
  for (auto& st : sts.value()) {
    switch (st.kind) {
      case Statement::Kind::Decl:
        if (!out.signature.push(st.name, st.type))
          return Diag(DiagCode::DuplicateName,
                      "constant '" + st.name + "' declared twice", st.span);
        break;
      case Statement::Kind::Rule: {
        RewriteRule r;
        r.pattern_ctx = std::move(st.ctx);
        r.lhs = st.lhs;
        r.rhs = st.rhs;
        r.type = st.type;
        r.span = st.span;
        out.rules.push_back(std::move(r));
        break;
      }
      case Statement::Kind::Judgment: {
        Judgment j;
        j.ctx = std::move(st.ctx);
        j.subject = st.lhs;
        j.type = st.rhs;
        j.span = st.span;
        out.judgments.push_back(std::move(j));
        break;
      }
    }
  }
  return out;
}

namespace {

Result<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Diag(DiagCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Result<SigFile> load_signature(const std::string& path) {
  auto src = slurp(path);
  if (!src) return src.error();
  return parse_signature(src.value(), path);
}

Result<SpecFile> parse_spec(const std::string& src, const std::string& filename) {
  Parser p(src, filename);
  SpecFile out;
  bool saw_any = false;
  auto is_section = [&](const char* name) {
    return p.at(Tok::Ident) && p.tok.text == name;
  };
  while (!p.at(Tok::End)) {
    if (p.pending) return *p.pending;
    std::string section;
    if (is_section("sorts") || is_section("axioms") || is_section("rules") ||
        is_section("default_sort")) {
      section = p.tok.text;
      p.bump();
    } else {
      return p.err("expected a section label (sorts, axioms, rules, default_sort)");
    }
    auto c = p.expect(Tok::Colon, "after the section label");
    if (!c) return c.error();
    saw_any = true;
    if (section == "sorts") {
      while (p.at(Tok::Ident) && p.tok.text != "sorts" && p.tok.text != "axioms" &&
             p.tok.text != "rules" && p.tok.text != "default_sort") {
        out.spec.sorts.push_back(p.tok.text);
        p.bump();
      }
    } else if (section == "default_sort") {
      if (!p.at(Tok::Ident)) return p.err("expected a sort name");
      out.default_sort = p.tok.text;
      p.bump();
    } else {
      while (p.at(Tok::LParen)) {
        p.bump();
        std::vector<std::string> parts;
        for (;;) {
          if (!p.at(Tok::Ident)) return p.err("expected a sort name");
          parts.push_back(p.tok.text);
          p.bump();
          if (p.at(Tok::Comma)) { p.bump(); continue; }
          break;
        }
        auto r = p.expect(Tok::RParen, "to close the tuple");
        if (!r) return r.error();
        if (section == "axioms") {
          if (parts.size() != 2)
            return Diag(DiagCode::ParseError, "axioms are pairs of sorts",
                        p.tok.span);
          out.spec.axioms.emplace_back(parts[0], parts[1]);
        } else {
          if (parts.size() != 3)
            return Diag(DiagCode::ParseError, "rules are triples of sorts",
                        p.tok.span);
          out.spec.rules.push_back({parts[0], parts[1], parts[2]});
        }
      }
    }
  }
  if (!saw_any) return Diag(DiagCode::ParseError, "empty specification");
  return out;
}

Result<SpecFile> load_spec(const std::string& path) {
  auto src = slurp(path);
  if (!src) return src.error();
  auto f = parse_spec(src.value(), path);
  if (!f) return f;
  SpecFile sf = std::move(f).take();
  // derive a display name from the file name
  size_t slash = path.find_last_of('/');
  std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
  size_t dot = stem.find_last_of('.');
  sf.spec.name = dot == std::string::npos ? stem : stem.substr(0, dot);
  return sf;
}

// -------------------------------------------------------------- printer

namespace {

enum class Pos { Term, Annot, ArrowLhs, AppFun, AppArg };

enum class Shape { Atom, App, Arrow, Binder };

Shape shape_of(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return Shape::Atom;
    case TermKind::App:
      return Shape::App;
    case TermKind::Pi:
      return uses_var0(t->b) ? Shape::Binder : Shape::Arrow;
    case TermKind::Lam:
      return Shape::Binder;
  }
  return Shape::Atom;
}

bool needs_parens(Shape s, Pos pos) {
  switch (pos) {
    case Pos::Term: return false;
    case Pos::Annot: return s == Shape::App || s == Shape::Binder;
    case Pos::ArrowLhs: return s != Shape::Atom;
    case Pos::AppFun: return s != Shape::Atom && s != Shape::App;
    case Pos::AppArg: return s != Shape::Atom;
  }
  return true;
}

struct Printer {
  std::set<std::string> reserved;  // constants and ambient names in the output
  std::vector<std::string> names;  // binder stack, innermost last
  int fresh_counter = 0;

  void collect_consts(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Const: reserved.insert(t->name); return;
      case TermKind::Var:
      case TermKind::Sort: return;
      default:
        collect_consts(t->a);
        collect_consts(t->b);
    }
  }

  std::string pick_name(const std::string& hint) {
    auto taken = [&](const std::string& n) {
      return reserved.count(n) ||
             std::find(names.begin(), names.end(), n) != names.end();
    };
    if (!hint.empty() && !taken(hint)) return hint;
    for (;;) {
      std::string cand = "x" + std::to_string(fresh_counter++);
      if (!taken(cand)) return cand;
    }
  }

  void pr(const TermPtr& t, Pos pos, std::string& out) {
    Shape s = shape_of(t);
    bool paren = needs_parens(s, pos);
    if (paren) out += '(';
    switch (t->kind) {
      case TermKind::Var: {
        int m = static_cast<int>(names.size());
        if (t->index < m) {
          out += names[m - 1 - t->index];
        } else {
          out += "_v" + std::to_string(t->index - m);
        }
        break;
      }
      case TermKind::Sort:
        switch (t->sort.kind) {
          case SortKind::LpmType: out += "Type"; break;
          case SortKind::LpmKind: out += "Kind"; break;
          case SortKind::PtsSort: out += t->sort.name; break;
        }
        break;
      case TermKind::Const:
        out += t->name;
        break;
      case TermKind::Pi:
        if (s == Shape::Arrow) {
          pr(t->a, Pos::ArrowLhs, out);
          out += " -> ";
          // drop the unused binder slot
          pr(subst(t->b, mk_var(0)), Pos::Term, out);
        } else {
          std::string n = pick_name(t->name);
          out += '!';
          out += n;
          out += ':';
          pr(t->a, Pos::Annot, out);
          out += ". ";
          names.push_back(n);
          pr(t->b, Pos::Term, out);
          names.pop_back();
        }
        break;
      case TermKind::Lam: {
        std::string n = pick_name(t->name);
        out += '\\';
        out += n;
        out += ':';
        pr(t->a, Pos::Annot, out);
        out += ". ";
        names.push_back(n);
        pr(t->b, Pos::Term, out);
        names.pop_back();
        break;
      }
      case TermKind::App:
        pr(t->a, Pos::AppFun, out);
        out += ' ';
        pr(t->b, Pos::AppArg, out);
        break;
    }
    if (paren) out += ')';
  }
};

}  // namespace

std::string print_term(const TermPtr& t) { return print_term(t, {}); }

std::string print_term(const TermPtr& t, const std::vector<std::string>& ambient) {
  Printer p;
  p.collect_consts(t);
  p.reserved.insert("Type");
  p.reserved.insert("Kind");
  for (const auto& n : ambient) p.reserved.insert(n);
  p.names = ambient;
  std::string out;
  p.pr(t, Pos::Term, out);
  return out;
}

std::string print_term_in(const TermPtr& t, const Context& ctx) {
  std::vector<std::string> names;
  names.reserve(ctx.size());
  for (const auto& e : ctx) names.push_back(e.name);
  return print_term(t, names);
}

namespace {

// Prints context entries, freshening their display names consistently and
// returning the chosen names so the body can be printed in scope.
std::string print_context_inner(const Context& ctx, const std::vector<TermPtr>& bodies,
                                std::vector<std::string>& chosen) {
  Printer p;
  for (const auto& e : ctx) p.collect_consts(e.type);
  for (const auto& b : bodies) p.collect_consts(b);
  p.reserved.insert("Type");
  p.reserved.insert("Kind");
  std::string out;
  bool first = true;
  for (const auto& e : ctx) {
    if (!first) out += ", ";
    first = false;
    std::string n = p.pick_name(e.name);
    out += n;
    out += ':';
    p.pr(e.type, Pos::Term, out);
    p.names.push_back(n);
  }
  chosen = p.names;
  return out;
}

}  // namespace

std::string print_context(const Context& ctx) {
  std::vector<std::string> chosen;
  return "[" + print_context_inner(ctx, {}, chosen) + "]";
}

std::string print_rule(const RewriteRule& r) {
  std::vector<std::string> chosen;
  std::string out = "[";
  out += print_context_inner(r.pattern_ctx, {r.lhs, r.rhs, r.type}, chosen);
  out += "] ";
  out += print_term(r.lhs, chosen);
  out += " --> ";
  out += print_term(r.rhs, chosen);
  out += " : ";
  out += print_term(r.type, chosen);
  out += ".";
  return out;
}

std::string print_judgment(const Judgment& j) {
  std::vector<std::string> chosen;
  std::vector<TermPtr> bodies{j.subject};
  if (j.type) bodies.push_back(j.type);
  std::string out = "[";
  out += print_context_inner(j.ctx, bodies, chosen);
  out += "] |- ";
  out += print_term(j.subject, chosen);
  if (j.type) {
    out += " : ";
    out += print_term(j.type, chosen);
  }
  out += ".";
  return out;
}

std::string print_signature(const Signature& sig, const RewriteSystem& rs) {
  std::string out;
  for (const auto& e : sig.entries) {
    out += e.name;
    out += " : ";
    out += print_term(e.type);
    out += ".\n";
  }
  for (const auto& r : rs.rules) {
    out += print_rule(r);
    out += "\n";
  }
  return out;
}

std::string print_spec(const SpecFile& f) {
  std::string out = "sorts:";
  for (const auto& s : f.spec.sorts) out += " " + s;
  out += "\naxioms:";
  for (const auto& [a, b] : f.spec.axioms) out += " (" + a + ", " + b + ")";
  out += "\nrules:";
  for (const auto& r : f.spec.rules) out += " (" + r[0] + ", " + r[1] + ", " + r[2] + ")";
  out += "\n";
  if (f.default_sort) out += "default_sort: " + *f.default_sort + "\n";
  return out;
}

// ------------------------------------------------------------ resolution

Result<TermPtr> resolve_pts_sorts(const TermPtr& t, const PtsSpec& spec) {
  switch (t->kind) {
    case TermKind::Var:
      return t;
    case TermKind::Sort:
      if (t->sort.kind == SortKind::PtsSort) return t;
      {
        std::string keyword = t->sort.kind == SortKind::LpmType ? "Type" : "Kind";
        if (spec.has_sort(keyword)) return mk_pts_sort(keyword);
        return Diag(DiagCode::UnknownSortName,
                    "'" + keyword + "' is not a sort of this specification");
      }
    case TermKind::Const:
      if (spec.has_sort(t->name)) return mk_pts_sort(t->name);
      return t;
    case TermKind::Pi:
    case TermKind::Lam: {
      auto a = resolve_pts_sorts(t->a, spec);
      if (!a) return a;
      auto b = resolve_pts_sorts(t->b, spec);
      if (!b) return b;
      return t->kind == TermKind::Pi ? mk_pi(a.value(), b.value(), t->name)
                                     : mk_lam(a.value(), b.value(), t->name);
    }
    case TermKind::App: {
      auto a = resolve_pts_sorts(t->a, spec);
      if (!a) return a;
      auto b = resolve_pts_sorts(t->b, spec);
      if (!b) return b;
      return mk_app(a.value(), b.value());
    }
  }
  return t;
}

Result<Context> resolve_pts_context(const Context& ctx, const PtsSpec& spec) {
  Context out;
  for (const auto& e : ctx) {
    auto ty = resolve_pts_sorts(e.type, spec);
    if (!ty) return ty.error();
    out.push_back({e.name, ty.value()});
  }
  return out;
}

Result<Judgment> resolve_pts_judgment(const Judgment& j, const PtsSpec& spec) {
  Judgment out = j;
  auto ctx = resolve_pts_context(j.ctx, spec);
  if (!ctx) return ctx.error();
  out.ctx = std::move(ctx).take();
  auto s = resolve_pts_sorts(j.subject, spec);
  if (!s) return s.error();
  out.subject = s.value();
  if (j.type) {
    auto ty = resolve_pts_sorts(j.type, spec);
    if (!ty) return ty.error();
    out.type = ty.value();
  }
  return out;
}

}  // namespace lpm
