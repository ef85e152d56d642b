#include "gom/parser.hpp"

#include <cctype>
#include <initializer_list>

#include "gom/matcher.hpp"

namespace gom {

namespace {

enum class Tok {
  Ident,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Colon,
  Semi,
  Arrow,
  Star,
  Underscore,
  Ellipsis,
  AndAnd,
  Bang,
  End,
};

std::string describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Arrow: return "'->'";
    case Tok::Star: return "'*'";
    case Tok::Underscore: return "'_'";
    case Tok::Ellipsis: return "'...'";
    case Tok::AndAnd: return "'&&'";
    case Tok::Bang: return "'!'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      SourcePos pos{line_, col_};
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, "", pos});
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = i_;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
          advance();
        }
        out.push_back({Tok::Ident, std::string(src_.substr(start, i_ - start)), pos});
        continue;
      }
      auto single = [&](Tok t) {
        out.push_back({t, std::string(1, c), pos});
        advance();
      };
      switch (c) {
        case '(': single(Tok::LParen); break;
        case ')': single(Tok::RParen); break;
        case '{': single(Tok::LBrace); break;
        case '}': single(Tok::RBrace); break;
        case ',': single(Tok::Comma); break;
        case ':': single(Tok::Colon); break;
        case ';': single(Tok::Semi); break;
        case '*': single(Tok::Star); break;
        case '!': single(Tok::Bang); break;
        case '_': single(Tok::Underscore); break;
        case '-':
          if (peek(1) != '>') fail(pos, c);
          advance();
          advance();
          out.push_back({Tok::Arrow, "->", pos});
          break;
        case '&':
          if (peek(1) != '&') fail(pos, c);
          advance();
          advance();
          out.push_back({Tok::AndAnd, "&&", pos});
          break;
        case '.':
          if (peek(1) != '.' || peek(2) != '.') fail(pos, c);
          advance();
          advance();
          advance();
          out.push_back({Tok::Ellipsis, "...", pos});
          break;
        default: fail(pos, c);
      }
    }
  }

 private:
  [[noreturn]] static void fail(SourcePos pos, char c) {
    throw SyntaxError(pos, {"token"}, std::string("'") + c + "'");
  }

  char peek(std::size_t k) const { return i_ + k < src_.size() ? src_[i_ + k] : '\0'; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_blank() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  SignatureModule module() {
    SignatureModule m;
    m.pos = peek().pos;
    keyword("module");
    m.name = ident();
    if (at_keyword("imports")) {
      next();
      while (at(Tok::Ident) && !at_keyword("public") && !at_keyword("sorts")) m.imports.push_back(ident());
    }
    if (at_keyword("public")) next();
    keyword("sorts");
    while (at(Tok::Ident) && !at_keyword("abstract")) {
      SourcePos pos = peek().pos;
      m.sorts.push_back({ident(), pos});
    }
    keyword("abstract");
    keyword("syntax");
    while (!at(Tok::End)) {
      if (at(Tok::Ellipsis)) {
        next();
        continue;
      }
      if (!at(Tok::Ident)) fail({"production", "hook", "factory block"});
      if (at_keyword("factory") && peek(1).kind == Tok::LBrace) {
        factory_block(m);
      } else if (peek(1).kind == Tok::Colon) {
        m.hooks.push_back(hook(m.name));
      } else {
        m.operators.push_back(production(m.name));
      }
    }
    return m;
  }

  SurfaceTerm term() {
    SurfaceTerm t;
    t.pos = peek().pos;
    t.head = ident();
    if (at(Tok::LParen)) {
      next();
      if (!at(Tok::RParen)) {
        t.children.push_back(term());
        while (at(Tok::Comma)) {
          next();
          t.children.push_back(term());
        }
      }
      expect(Tok::RParen, {"','", "')'"});
    }
    return t;
  }

  PatternExpr pattern() {
    PatternExpr p;
    p.pos = peek().pos;
    if (at(Tok::Underscore)) {
      next();
      p.name = "_";
      return p;
    }
    p.name = ident({"pattern"});
    if (at(Tok::Star)) {
      next();
      p.star = true;
      return p;
    }
    if (at(Tok::LParen)) {
      next();
      p.call = true;
      p.args = pattern_list_until(Tok::RParen);
    }
    return p;
  }

  void finish() { expect(Tok::End, {describe(Tok::End)}); }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }
  const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? describe(Tok::End) : "'" + t.text + "'";
    throw SyntaxError(t.pos, std::move(expected), std::move(found));
  }

  const Token& expect(Tok t, std::vector<std::string> expected) {
    if (!at(t)) fail(std::move(expected));
    return next();
  }
  const Token& expect(Tok t) { return expect(t, {describe(t)}); }

  void keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail({"'" + std::string(kw) + "'"});
    next();
  }

  std::string ident(std::vector<std::string> expected = {"identifier"}) {
    return expect(Tok::Ident, std::move(expected)).text;
  }

  OperatorDecl production(const std::string& module) {
    OperatorDecl op;
    op.pos = peek().pos;
    op.origin = module;
    op.name = ident();
    FixedArity fixed;
    if (at(Tok::LParen)) {
      next();
      if (at(Tok::Ident) && peek(1).kind == Tok::Star) {
        op.kind = Variadic{ident()};
        next();
        expect(Tok::RParen);
      } else if (!at(Tok::RParen)) {
        for (;;) {
          Slot slot;
          slot.name = ident({"slot name", "sort name"});
          expect(Tok::Colon, {"':'"});
          slot.sort = ident({"sort name"});
          fixed.slots.push_back(std::move(slot));
          if (!at(Tok::Comma)) break;
          next();
        }
        expect(Tok::RParen, {"','", "')'"});
        op.kind = std::move(fixed);
      } else {
        next();
        op.kind = std::move(fixed);
      }
    } else {
      op.kind = std::move(fixed);
    }
    expect(Tok::Arrow, {"'('", "'->'"});
    op.result_sort = ident({"sort name"});
    return op;
  }

  void factory_block(SignatureModule& m) {
    next();
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      SourcePos pos = peek().pos;
      m.factory.push_back({ident({"builtin name", "'}'"}), pos});
      expect(Tok::Semi);
    }
    next();
  }

  HookDecl hook(const std::string& module) {
    HookDecl h;
    h.pos = peek().pos;
    h.origin = module;
    h.op = ident();
    expect(Tok::Colon);
    auto kind_pos = peek();
    auto kind = hook_kind_from_string(kind_pos.kind == Tok::Ident ? kind_pos.text : "");
    if (!kind) {
      fail({"make", "make_before", "make_after", "make_insert", "make_before_insert", "make_after_insert"});
    }
    next();
    h.kind = *kind;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      h.params.push_back(ident({"parameter name"}));
      while (at(Tok::Comma)) {
        next();
        h.params.push_back(ident({"parameter name"}));
      }
    }
    expect(Tok::RParen, {"','", "')'"});
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) h.body.push_back(clause());
    next();
    return h;
  }

  RuleClause clause() {
    RuleClause c;
    c.pos = peek().pos;
    c.patterns.push_back(pattern());
    while (at(Tok::Comma)) {
      next();
      c.patterns.push_back(pattern());
    }
    if (at_keyword("where")) {
      next();
      c.guard = guard();
    }
    expect(Tok::Arrow, {"','", "'where'", "'->'"});
    c.action.pos = peek().pos;
    if (at_keyword("raw") && peek(1).kind == Tok::LParen) {
      next();
      next();
      c.action.kind = ActionKind::Raw;
      c.action.items = pattern_list_until(Tok::RParen);
    } else if (at(Tok::LParen)) {
      next();
      c.action.kind = ActionKind::Tuple;
      c.action.items = pattern_list_until(Tok::RParen);
    } else {
      c.action.kind = ActionKind::Build;
      c.action.items.push_back(pattern());
    }
    expect(Tok::Semi);
    return c;
  }

  // Items separated by commas, closing token consumed.
  std::vector<PatternExpr> pattern_list_until(Tok close) {
    std::vector<PatternExpr> items;
    if (at(close)) {
      next();
      return items;
    }
    items.push_back(pattern());
    while (at(Tok::Comma)) {
      next();
      items.push_back(pattern());
    }
    expect(close, {"','", describe(close)});
    return items;
  }

  GuardExpr guard() {
    GuardExpr first = guard_unary();
    if (!at(Tok::AndAnd)) return first;
    GuardExpr conj;
    conj.op = GuardOp::And;
    conj.pos = first.pos;
    conj.operands.push_back(std::move(first));
    while (at(Tok::AndAnd)) {
      next();
      conj.operands.push_back(guard_unary());
    }
    return conj;
  }

  GuardExpr guard_unary() {
    GuardExpr g;
    g.pos = peek().pos;
    if (at(Tok::Bang)) {
      next();
      g.op = GuardOp::Not;
      g.operands.push_back(guard_unary());
      return g;
    }
    if (at(Tok::LParen)) {
      next();
      g = guard();
      expect(Tok::RParen);
      return g;
    }
    g.op = GuardOp::Predicate;
    g.predicate = ident({"predicate", "'!'", "'('"});
    expect(Tok::LParen);
    g.args = pattern_list_until(Tok::RParen);
    return g;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

void print_surface(std::string& out, const SurfaceTerm& t) {
  out += t.head;
  if (t.children.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (i) out += ',';
    print_surface(out, t.children[i]);
  }
  out += ')';
}

}  // namespace

SignatureModule parse_module(std::string_view text) {
  Parser p(text);
  auto m = p.module();
  p.finish();
  return m;
}

SurfaceTerm parse_term(std::string_view text) {
  Parser p(text);
  auto t = p.term();
  p.finish();
  return t;
}

PatternExpr parse_pattern_expr(std::string_view text) {
  Parser p(text);
  auto e = p.pattern();
  p.finish();
  return e;
}

Pattern parse_pattern(std::string_view text, const Signature& sig) {
  return compile_pattern(parse_pattern_expr(text), sig);
}

std::string to_string(const SurfaceTerm& term) {
  std::string out;
  print_surface(out, term);
  return out;
}

}  // namespace gom
