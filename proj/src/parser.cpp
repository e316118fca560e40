#include "lamref/parser.hpp"

#include <cctype>
#include <vector>

namespace lamref {

namespace {

struct Token {
  enum class Kind {
    Ident, Int, Loc,
    LParen, RParen, LBrace, RBrace,
    Comma, Semi, Colon, Eq, ColonEq, Arrow, Bar, Bang, Plus, Star,
    End,
  };
  Kind kind;
  std::string text;
  long value = 0;
  int pos = 0;
};

struct Lexer {
  explicit Lexer(const std::string& src) : s(src) { advance(); }

  const Token& peek() const { return tok; }

  Token next() {
    Token t = tok;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(tok.pos, msg);
  }

 private:
  void advance() {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) ||
                            s.compare(i, 2, "//") == 0)) {
      if (s.compare(i, 2, "//") == 0)
        while (i < s.size() && s[i] != '\n') ++i;
      else
        ++i;
    }
    tok.pos = static_cast<int>(i);
    if (i >= s.size()) {
      tok.kind = Token::Kind::End;
      tok.text = "<end>";
      return;
    }
    char c = s[i];
    auto punct = [&](Token::Kind k, size_t n, const char* txt) {
      tok.kind = k;
      tok.text = txt;
      i += n;
    };
    switch (c) {
      case '(': punct(Token::Kind::LParen, 1, "("); return;
      case ')': punct(Token::Kind::RParen, 1, ")"); return;
      case '{': punct(Token::Kind::LBrace, 1, "{"); return;
      case '}': punct(Token::Kind::RBrace, 1, "}"); return;
      case ',': punct(Token::Kind::Comma, 1, ","); return;
      case ';': punct(Token::Kind::Semi, 1, ";"); return;
      case '|': punct(Token::Kind::Bar, 1, "|"); return;
      case '!': punct(Token::Kind::Bang, 1, "!"); return;
      case '+': punct(Token::Kind::Plus, 1, "+"); return;
      case '*': punct(Token::Kind::Star, 1, "*"); return;
      case '=': punct(Token::Kind::Eq, 1, "="); return;
      case ':':
        if (i + 1 < s.size() && s[i + 1] == '=') punct(Token::Kind::ColonEq, 2, ":=");
        else punct(Token::Kind::Colon, 1, ":");
        return;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') { punct(Token::Kind::Arrow, 2, "->"); return; }
        throw ParseError(static_cast<int>(i), "unexpected '-'");
      case '#': {
        size_t j = i + 1;
        if (j >= s.size() || !std::isdigit(static_cast<unsigned char>(s[j])))
          throw ParseError(static_cast<int>(i), "expected digits after '#'");
        long v = 0;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
          v = v * 10 + (s[j++] - '0');
        tok.kind = Token::Kind::Loc;
        tok.value = v;
        tok.text = s.substr(i, j - i);
        i = j;
        return;
      }
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      long v = 0;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
        v = v * 10 + (s[j++] - '0');
      tok.kind = Token::Kind::Int;
      tok.value = v;
      tok.text = s.substr(i, j - i);
      i = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                              s[j] == '_' || s[j] == '\''))
        ++j;
      tok.kind = Token::Kind::Ident;
      tok.text = s.substr(i, j - i);
      i = j;
      return;
    }
    throw ParseError(static_cast<int>(i),
                     std::string("unexpected character '") + c + "'");
  }

  const std::string& s;
  size_t i = 0;
  Token tok;
};

// `cell` and `layout` are positional: they introduce the preamble only and
// stay usable as sort names and identifiers (the running example's signature
// has a sort called `cell`).
bool is_keyword(const std::string& w) {
  static const std::set<std::string> kws = {"fun",  "match", "with", "new",
                                            "in",   "let",   "ref",  "inj1",
                                            "inj2", "true",  "false", "bool"};
  return kws.count(w) != 0;
}

struct Parser {
  explicit Parser(const std::string& src) : lx(src) {}

  Lexer lx;

  bool at_ident(const char* kw) const {
    return lx.peek().kind == Token::Kind::Ident && lx.peek().text == kw;
  }
  bool at(Token::Kind k) const { return lx.peek().kind == k; }

  Token expect(Token::Kind k, const char* what) {
    if (!at(k)) lx.fail(std::string("expected ") + what + ", found '" + lx.peek().text + "'");
    return lx.next();
  }

  void expect_kw(const char* kw) {
    if (!at_ident(kw)) lx.fail(std::string("expected '") + kw + "', found '" + lx.peek().text + "'");
    lx.next();
  }

  std::string ident() {
    Token t = expect(Token::Kind::Ident, "an identifier");
    if (is_keyword(t.text)) throw ParseError(t.pos, "'" + t.text + "' is a keyword");
    return t.text;
  }

  // --- types -----------------------------------------------------------

  TypePtr parse_type() {
    TypePtr lhs = parse_sum_type();
    if (at(Token::Kind::Arrow)) {
      lx.next();
      return Type::arrow(lhs, parse_type());
    }
    return lhs;
  }

  TypePtr parse_sum_type() {
    TypePtr lhs = parse_prod_type();
    if (at(Token::Kind::Plus)) {
      lx.next();
      return Type::sum(lhs, parse_sum_type());
    }
    return lhs;
  }

  TypePtr parse_prod_type() {
    TypePtr lhs = parse_atom_type();
    if (at(Token::Kind::Star)) {
      lx.next();
      return Type::product(lhs, parse_prod_type());
    }
    return lhs;
  }

  TypePtr parse_atom_type() {
    const Token& t = lx.peek();
    if (t.kind == Token::Kind::Int) {
      if (t.value == 0) { lx.next(); return Type::empty(); }
      if (t.value == 1) { lx.next(); return Type::unit(); }
      lx.fail("types use only the literals 0 and 1");
    }
    if (t.kind == Token::Kind::LParen) {
      lx.next();
      TypePtr inner = parse_type();
      expect(Token::Kind::RParen, "')'");
      return inner;
    }
    if (at_ident("bool")) { lx.next(); return Type::boolean(); }
    if (at_ident("ref")) {
      lx.next();
      return Type::ref(ident());
    }
    lx.fail("expected a type");
  }

  // --- terms (surface) ---------------------------------------------------

  SurfacePtr mksp(Surface&& s) { return std::make_shared<Surface>(std::move(s)); }

  SurfacePtr parse_term() {  // with ascription
    int pos = lx.peek().pos;
    SurfacePtr t = parse_seq();
    if (at(Token::Kind::Colon)) {
      lx.next();
      Surface a;
      a.kind = Surface::Kind::Ascribe;
      a.pos = pos;
      a.s0 = t;
      a.annot = parse_type();
      return mksp(std::move(a));
    }
    return t;
  }

  SurfacePtr parse_seq() {
    int pos = lx.peek().pos;
    SurfacePtr t = parse_assign();
    if (at(Token::Kind::Semi)) {
      lx.next();
      Surface s;
      s.kind = Surface::Kind::Seq;
      s.pos = pos;
      s.s0 = t;
      s.s1 = parse_seq();
      return mksp(std::move(s));
    }
    return t;
  }

  SurfacePtr parse_assign() {
    int pos = lx.peek().pos;
    SurfacePtr t = parse_app();
    if (at(Token::Kind::ColonEq)) {
      lx.next();
      Surface s;
      s.kind = Surface::Kind::Assign;
      s.pos = pos;
      s.s0 = t;
      s.s1 = parse_assign();
      return mksp(std::move(s));
    }
    return t;
  }

  bool starts_argument() const {
    // Open forms (fun/match/new/let/ref) do not start application arguments;
    // they would be consumed as the head's continuation otherwise.
    switch (lx.peek().kind) {
      case Token::Kind::Bang:
      case Token::Kind::LParen:
      case Token::Kind::Loc:
        return true;
      case Token::Kind::Ident:
        return !is_keyword(lx.peek().text) || at_ident("inj1") ||
               at_ident("inj2") || at_ident("true") || at_ident("false");
      default:
        return false;
    }
  }

  SurfacePtr parse_app() {
    int pos = lx.peek().pos;
    SurfacePtr head = parse_prefix();
    while (starts_argument()) {
      Surface s;
      s.kind = Surface::Kind::App;
      s.pos = pos;
      s.s0 = head;
      s.s1 = parse_prefix_tight();
      head = mksp(std::move(s));
    }
    return head;
  }

  // A prefix term in argument position: no open forms.
  SurfacePtr parse_prefix_tight() {
    if (at(Token::Kind::Bang) || at_ident("inj1") || at_ident("inj2"))
      return parse_prefix();
    return parse_atom();
  }

  SurfacePtr parse_prefix() {
    int pos = lx.peek().pos;
    if (at(Token::Kind::Bang)) {
      lx.next();
      Surface s;
      s.kind = Surface::Kind::Deref;
      s.pos = pos;
      s.s0 = parse_prefix();
      return mksp(std::move(s));
    }
    if (at_ident("inj1") || at_ident("inj2")) {
      int tag = at_ident("inj1") ? 1 : 2;
      lx.next();
      Surface s;
      s.kind = Surface::Kind::Inj;
      s.pos = pos;
      s.inj_tag = tag;
      s.s0 = parse_prefix();
      return mksp(std::move(s));
    }
    if (at_ident("fun")) return parse_fun();
    if (at_ident("match")) return parse_match();
    if (at_ident("new")) return parse_new();
    if (at_ident("let")) return parse_let();
    if (at_ident("ref")) return parse_refnew();
    return parse_atom();
  }

  SurfacePtr parse_atom() {
    const Token& t = lx.peek();
    int pos = t.pos;
    switch (t.kind) {
      case Token::Kind::Loc: {
        Surface s;
        s.kind = Surface::Kind::Loc;
        s.pos = pos;
        s.loc = static_cast<int>(lx.next().value);
        return mksp(std::move(s));
      }
      case Token::Kind::LParen: {
        lx.next();
        if (at(Token::Kind::RParen)) {
          lx.next();
          Surface s;
          s.kind = Surface::Kind::Star;
          s.pos = pos;
          return mksp(std::move(s));
        }
        std::vector<SurfacePtr> items;
        items.push_back(parse_term());
        while (at(Token::Kind::Comma)) {
          lx.next();
          items.push_back(parse_term());
        }
        expect(Token::Kind::RParen, "')'");
        if (items.size() == 1) return items[0];
        Surface s;
        s.kind = Surface::Kind::Tuple;
        s.pos = pos;
        s.items = std::move(items);
        return mksp(std::move(s));
      }
      case Token::Kind::Ident: {
        if (at_ident("true") || at_ident("false")) {
          bool b = at_ident("true");
          lx.next();
          Surface st;
          st.kind = Surface::Kind::Star;
          st.pos = pos;
          Surface s;
          s.kind = Surface::Kind::Inj;
          s.pos = pos;
          s.inj_tag = b ? 1 : 2;
          s.annot = Type::boolean();
          s.s0 = mksp(std::move(st));
          return mksp(std::move(s));
        }
        Surface s;
        s.kind = Surface::Kind::Var;
        s.pos = pos;
        s.var = ident();
        return mksp(std::move(s));
      }
      default:
        lx.fail("expected a term");
    }
  }

  SurfacePtr parse_fun() {
    int pos = lx.peek().pos;
    expect_kw("fun");
    expect(Token::Kind::LParen, "'('");
    std::string x = ident();
    expect(Token::Kind::Colon, "':'");
    TypePtr ty = parse_type();
    expect(Token::Kind::RParen, "')'");
    expect(Token::Kind::Arrow, "'->'");
    Surface s;
    s.kind = Surface::Kind::Fun;
    s.pos = pos;
    s.var = x;
    s.annot = ty;
    s.s0 = parse_term();
    return mksp(std::move(s));
  }

  SurfacePtr parse_match() {
    int pos = lx.peek().pos;
    expect_kw("match");
    SurfacePtr scrut = parse_seq();  // no ascription before 'with'
    expect_kw("with");
    if (at(Token::Kind::LBrace)) {
      lx.next();
      expect(Token::Kind::RBrace, "'}'");
      expect(Token::Kind::Colon, "':'");
      Surface s;
      s.kind = Surface::Kind::MatchEmpty;
      s.pos = pos;
      s.s0 = scrut;
      s.annot = parse_type();
      return mksp(std::move(s));
    }
    if (at_ident("inj1")) {
      lx.next();
      std::string x1 = ident();
      expect(Token::Kind::Arrow, "'->'");
      SurfacePtr t1 = parse_term();
      expect(Token::Kind::Bar, "'|'");
      expect_kw("inj2");
      std::string x2 = ident();
      expect(Token::Kind::Arrow, "'->'");
      SurfacePtr t2 = parse_term();
      Surface s;
      s.kind = Surface::Kind::MatchSum;
      s.pos = pos;
      s.s0 = scrut;
      s.var = x1;
      s.s1 = t1;
      s.var2 = x2;
      s.s2 = t2;
      return mksp(std::move(s));
    }
    if (at(Token::Kind::LParen)) {
      lx.next();
      std::string x1 = ident();
      expect(Token::Kind::Comma, "','");
      std::string x2 = ident();
      expect(Token::Kind::RParen, "')'");
      expect(Token::Kind::Arrow, "'->'");
      Surface s;
      s.kind = Surface::Kind::MatchProd;
      s.pos = pos;
      s.s0 = scrut;
      s.var = x1;
      s.var2 = x2;
      s.s1 = parse_term();
      return mksp(std::move(s));
    }
    lx.fail("expected '{}', 'inj1' or '(' after 'with'");
  }

  SurfacePtr parse_new() {
    int pos = lx.peek().pos;
    expect_kw("new");
    expect(Token::Kind::LBrace, "'{'");
    Surface s;
    s.kind = Surface::Kind::New;
    s.pos = pos;
    while (true) {
      std::string x = ident();
      expect(Token::Kind::Colon, "':'");
      std::string sort = ident();
      expect(Token::Kind::Eq, "'='");
      SurfacePtr init = parse_term();
      s.binders.push_back({x, sort, init});
      if (at(Token::Kind::Comma)) {
        lx.next();
        continue;
      }
      break;
    }
    expect(Token::Kind::RBrace, "'}'");
    expect_kw("in");
    s.s0 = parse_term();
    return mksp(std::move(s));
  }

  SurfacePtr parse_let() {
    int pos = lx.peek().pos;
    expect_kw("let");
    std::string x = ident();
    TypePtr ty = nullptr;
    if (at(Token::Kind::Colon)) {
      lx.next();
      ty = parse_type();
    }
    expect(Token::Kind::Eq, "'='");
    SurfacePtr rhs = parse_term();
    expect_kw("in");
    Surface s;
    s.kind = Surface::Kind::Let;
    s.pos = pos;
    s.var = x;
    s.annot = ty;
    s.s0 = rhs;
    s.s1 = parse_term();
    return mksp(std::move(s));
  }

  SurfacePtr parse_refnew() {
    int pos = lx.peek().pos;
    expect_kw("ref");
    std::string sort = ident();
    Surface s;
    s.kind = Surface::Kind::RefNew;
    s.pos = pos;
    s.sort = sort;
    s.s0 = parse_prefix_tight();
    return mksp(std::move(s));
  }

  // --- program structure -------------------------------------------------

  GroundTypePtr to_ground_checked(const TypePtr& ty, int pos) {
    if (!ty->is_ground())
      throw ParseError(pos, "cell content types must be full ground types");
    return ty->to_ground();
  }

  ParsedProgram parse_program() {
    ParsedProgram out;
    std::vector<std::pair<std::string, GroundTypePtr>> decls;
    while (at_ident("cell")) {
      lx.next();
      std::string name = ident();
      expect(Token::Kind::Eq, "'='");
      int tpos = lx.peek().pos;
      TypePtr ty = parse_type();
      expect(Token::Kind::Semi, "';'");
      decls.emplace_back(name, to_ground_checked(ty, tpos));
    }
    out.sig = validate_signature(decls);

    std::vector<std::pair<int, SurfacePtr>> heap_inits;
    if (at_ident("layout")) {
      lx.next();
      expect(Token::Kind::LBrace, "'{'");
      if (!at(Token::Kind::RBrace)) {
        while (true) {
          Token lt = expect(Token::Kind::Loc, "a location literal '#i'");
          expect(Token::Kind::Colon, "':'");
          std::string sort = ident();
          if (!out.sig.has_sort(sort)) throw ParseError(lt.pos, "unknown sort " + sort);
          if (out.layout.cells.count(static_cast<int>(lt.value)))
            throw ParseError(lt.pos, "duplicate layout entry " + lt.text);
          out.layout.cells[static_cast<int>(lt.value)] = sort;
          if (at(Token::Kind::Eq)) {
            lx.next();
            heap_inits.emplace_back(static_cast<int>(lt.value), parse_term());
          }
          if (at(Token::Kind::Comma)) {
            lx.next();
            continue;
          }
          break;
        }
      }
      expect(Token::Kind::RBrace, "'}'");
    }

    out.surface = parse_term();
    expect(Token::Kind::End, "end of input");

    DesugarEnv env;
    env.sig = &out.sig;
    env.layout = &out.layout.cells;
    for (const auto& [loc, init] : heap_inits) {
      TypePtr content =
          Type::from_ground(out.sig.content_type(out.layout.cells.at(loc)));
      TermPtr v = surface_to_core(desugar(init, env, content));
      if (!is_value(v))
        throw ParseError(init->pos, "initial heap entries must be values");
      out.initial_heap[loc] = v;
    }
    out.term = surface_to_core(desugar(out.surface, env));
    check_new_initialisers(out.term);
    return out;
  }

  // The value restriction on allocation is syntactic (parse-time).
  void check_new_initialisers(const TermPtr& t) {
    if (t->kind == Term::Kind::New)
      for (const auto& b : t->binders)
        if (!is_value(b.init))
          throw ParseError(b.init->pos,
                           "allocation initialisers must be values");
    for (const TermPtr& sub : {t->t0, t->t1, t->t2})
      if (sub) check_new_initialisers(sub);
    for (const auto& b : t->binders) check_new_initialisers(b.init);
  }
};

}  // namespace

ParsedProgram parse_program(const std::string& text) {
  Parser p(text);
  return p.parse_program();
}

GroundTypePtr parse_ground_type(const std::string& text) {
  Parser p(text);
  int pos = p.lx.peek().pos;
  TypePtr ty = p.parse_type();
  p.expect(Token::Kind::End, "end of input");
  return p.to_ground_checked(ty, pos);
}

TypePtr parse_type(const std::string& text) {
  Parser p(text);
  TypePtr ty = p.parse_type();
  p.expect(Token::Kind::End, "end of input");
  return ty;
}

Layout parse_layout(const std::string& text) {
  Parser p(text);
  Layout w;
  p.expect(Token::Kind::LBrace, "'{'");
  if (!p.at(Token::Kind::RBrace)) {
    while (true) {
      Token lt = p.expect(Token::Kind::Loc, "a location literal '#i'");
      p.expect(Token::Kind::Colon, "':'");
      std::string sort = p.ident();
      w.cells[static_cast<int>(lt.value)] = sort;
      if (p.at(Token::Kind::Comma)) {
        p.lx.next();
        continue;
      }
      break;
    }
  }
  p.expect(Token::Kind::RBrace, "'}'");
  p.expect(Token::Kind::End, "end of input");
  return w;
}

std::map<int, TermPtr> parse_heap_values(const Signature& sig, const Layout& w,
                                         const std::string& text) {
  Parser p(text);
  std::map<int, TermPtr> out;
  DesugarEnv env;
  env.sig = &sig;
  env.layout = &w.cells;
  p.expect(Token::Kind::LBrace, "'{'");
  if (!p.at(Token::Kind::RBrace)) {
    while (true) {
      Token lt = p.expect(Token::Kind::Loc, "a location literal '#i'");
      int loc = static_cast<int>(lt.value);
      if (!w.contains(loc)) throw ParseError(lt.pos, "location not in layout");
      p.expect(Token::Kind::Eq, "'='");
      SurfacePtr v = p.parse_term();
      TypePtr content = Type::from_ground(sig.content_type(w.cells.at(loc)));
      out[loc] = surface_to_core(desugar(v, env, content));
      if (p.at(Token::Kind::Comma)) {
        p.lx.next();
        continue;
      }
      break;
    }
  }
  p.expect(Token::Kind::RBrace, "'}'");
  p.expect(Token::Kind::End, "end of input");
  return out;
}

TermPtr parse_term(const Signature& sig, const Layout& w,
                   const std::string& text) {
  Parser p(text);
  SurfacePtr s = p.parse_term();
  p.expect(Token::Kind::End, "end of input");
  DesugarEnv env;
  env.sig = &sig;
  env.layout = &w.cells;
  return surface_to_core(desugar(s, env));
}

}  // namespace lamref
