#include "cbpv/parse.hpp"

#include <cctype>
#include <charconv>

namespace cbpv {

namespace {

enum class Tok {
  Ident,
  Number,
  Backslash,
  Dot,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Equals,
  Plus,
  Minus,
  Star,
  KwForce,
  KwPrd,
  KwThunk,
  KwLetrec,
  KwAnd,
  KwIn,
  KwTo,
  KwIf0,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t num = 0;
  int line = 1, col = 1;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Backslash: return "'\\'";
    case Tok::Dot: return "'.'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Equals: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::KwForce: return "'force'";
    case Tok::KwPrd: return "'prd'";
    case Tok::KwThunk: return "'thunk'";
    case Tok::KwLetrec: return "'letrec'";
    case Tok::KwAnd: return "'and'";
    case Tok::KwIn: return "'in'";
    case Tok::KwTo: return "'to'";
    case Tok::KwIf0: return "'if0'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool ends_value(Tok t) {
  return t == Tok::Ident || t == Tok::Number || t == Tok::RBrace || t == Tok::RParen;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto bump = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') bump(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    bool neg = c == '-' && i + 1 < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[i + 1])) &&
               (out.empty() || !ends_value(out.back().kind));
    if (std::isdigit(static_cast<unsigned char>(c)) || neg) {
      std::size_t j = i + (neg ? 1 : 0);
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      auto [p, ec] = std::from_chars(src.data() + i, src.data() + j, t.num);
      if (ec != std::errc{}) throw SyntaxError(line, col, "integer literal out of range");
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      bump(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\''))
        ++j;
      t.text = std::string(src.substr(i, j - i));
      static const std::pair<const char*, Tok> kws[] = {
          {"force", Tok::KwForce}, {"prd", Tok::KwPrd}, {"thunk", Tok::KwThunk},
          {"letrec", Tok::KwLetrec}, {"and", Tok::KwAnd}, {"in", Tok::KwIn},
          {"to", Tok::KwTo}, {"if0", Tok::KwIf0}};
      t.kind = Tok::Ident;
      for (auto& [w, k] : kws)
        if (t.text == w) t.kind = k;
      bump(j - i);
      out.push_back(std::move(t));
      continue;
    }
    switch (c) {
      case '\\': t.kind = Tok::Backslash; break;
      case '.': t.kind = Tok::Dot; break;
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '=': t.kind = Tok::Equals; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      default:
        throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    }
    t.text = std::string(1, c);
    bump(1);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  TermPtr top() {
    auto t = term();
    expect(Tok::End);
    return t;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  Token next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(peek().line, peek().col,
                      what + ", found " + describe(peek().kind) +
                          (peek().kind == Tok::End ? "" : " '" + peek().text + "'"));
  }

  Token expect(Tok k) {
    if (!at(k)) fail(std::string("expected ") + describe(k));
    return next();
  }

  std::string ident() { return expect(Tok::Ident).text; }

  bool value_start() const {
    return at(Tok::Ident) || at(Tok::Number) || at(Tok::KwThunk);
  }

  Value value() {
    if (at(Tok::Ident)) return build::var(next().text);
    if (at(Tok::Number)) return build::num(next().num);
    if (at(Tok::KwThunk)) {
      next();
      expect(Tok::LBrace);
      auto m = term();
      expect(Tok::RBrace);
      return build::thunk(m);
    }
    fail("expected a value");
  }

  TermPtr term() {
    if (at(Tok::Backslash)) return lambda();
    if (at(Tok::KwLetrec)) return letrec();
    auto left = app();
    if (at(Tok::KwTo)) {
      next();
      auto x = ident();
      expect(Tok::KwIn);
      return build::seq(left, x, term());
    }
    return left;
  }

  TermPtr lambda() {
    expect(Tok::Backslash);
    auto x = ident();
    expect(Tok::Dot);
    return build::lam(x, term());
  }

  TermPtr letrec() {
    expect(Tok::KwLetrec);
    std::vector<Def> defs;
    do {
      auto x = ident();
      expect(Tok::Equals);
      defs.push_back({x, term()});
    } while (at(Tok::KwAnd) && (next(), true));
    expect(Tok::KwIn);
    return build::letrec(std::move(defs), term());
  }

  TermPtr app() {
    if (value_start()) {
      auto v = value();
      if (at(Tok::Plus) || at(Tok::Minus) || at(Tok::Star)) {
        auto k = next().kind;
        ArithOp o = k == Tok::Plus ? ArithOp::Add : k == Tok::Minus ? ArithOp::Sub : ArithOp::Mul;
        return build::op(v, o, value());
      }
      if (!at(Tok::Dot)) fail("expected '.' or an operator after a value");
      next();
      if (at(Tok::Backslash)) return build::app(v, lambda());
      if (at(Tok::KwLetrec)) return build::app(v, letrec());
      return build::app(v, app());
    }
    switch (peek().kind) {
      case Tok::KwForce: next(); return build::force(value());
      case Tok::KwPrd: next(); return build::prd(value());
      case Tok::KwIf0: {
        next();
        auto g = value();
        expect(Tok::LBrace);
        auto a = term();
        expect(Tok::RBrace);
        expect(Tok::LBrace);
        auto b = term();
        expect(Tok::RBrace);
        return build::if0(g, a, b);
      }
      case Tok::LParen: {
        next();
        auto m = term();
        expect(Tok::RParen);
        return m;
      }
      default: fail("expected a computation");
    }
  }
};

}  // namespace

TermPtr parse_source(std::string_view text) { return Parser(lex(text)).top(); }

}  // namespace cbpv
