#include "sjs/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <vector>

namespace sjs {

namespace {

enum class Tok { Ident, Int, Str, Punct, Keyword, End };

struct Token {
  Tok kind;
  std::string text;
  Span span;
  bool newline_before = false;
};

const std::set<std::string> kKeywords = {"var", "function", "fun", "return", "null", "this", "proto"};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool newline = false;
    for (;;) {
      newline |= skip_space();
      Token t = next();
      t.newline_before = newline;
      newline = false;
      out.push_back(t);
      if (t.kind == Tok::End) return out;
    }
  }

 private:
  const std::string& text_;
  std::uint32_t pos_ = 0, line_ = 1, col_ = 1;

  char peek(std::uint32_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  Span here() const { return Span{pos_, pos_ + 1, line_, col_}; }

  bool skip_space() {
    bool newline = false;
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == '\n') {
        newline = true;
        advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        Span start = here();
        advance();
        advance();
        while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/')) {
          if (peek() == '\n') newline = true;
          advance();
        }
        if (pos_ >= text_.size()) throw ParseError("unterminated comment", start);
        advance();
        advance();
      } else {
        break;
      }
    }
    return newline;
  }

  Token next() {
    Span start = here();
    auto finish = [&](Tok kind, std::string s) {
      start.end = pos_;
      return Token{kind, std::move(s), start, false};
    };
    if (pos_ >= text_.size()) return Token{Tok::End, "", Span{pos_, pos_, line_, col_}, false};
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::string s;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '$') {
        s += peek();
        advance();
      }
      return finish(kKeywords.count(s) ? Tok::Keyword : Tok::Ident, s);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        s += peek();
        advance();
      }
      if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')
        throw ParseError("malformed number", start);
      return finish(Tok::Int, s);
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      advance();
      std::string s;
      for (;;) {
        if (pos_ >= text_.size() || peek() == '\n') throw ParseError("unterminated string", start);
        char d = peek();
        advance();
        if (d == quote) break;
        if (d == '\\') {
          if (pos_ >= text_.size()) throw ParseError("unterminated string", start);
          char e = peek();
          advance();
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '\\': s += '\\'; break;
            case '"': s += '"'; break;
            case '\'': s += '\''; break;
            default: throw ParseError(std::string("unknown escape \\") + e, start);
          }
        } else {
          s += d;
        }
      }
      return finish(Tok::Str, s);
    }
    if (std::string("{}()[];:,.=+?").find(c) != std::string::npos) {
      advance();
      return finish(Tok::Punct, std::string(1, c));
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
};

Span join(const Span& a, const Span& b) { return Span{a.begin, b.end, a.line, a.col}; }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ExprPtr program() {
    if (at_end()) throw ParseError("empty program", cur().span);
    ExprPtr e = statements(/*closer=*/"");
    if (!at_end()) throw ParseError("unexpected '" + cur().text + "'", cur().span);
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;

  const Token& cur() const { return toks_[i_]; }
  const Token& prev() const { return toks_[i_ - 1]; }
  bool at_end() const { return cur().kind == Tok::End; }
  bool is_punct(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_kw(const char* k) const { return cur().kind == Tok::Keyword && cur().text == k; }
  bool accept(const char* p) {
    if (!is_punct(p)) return false;
    ++i_;
    return true;
  }
  const Token& expect(const char* p) {
    if (!is_punct(p)) {
      std::string got = at_end() ? "end of input" : "'" + cur().text + "'";
      throw ParseError(std::string("expected '") + p + "' but found " + got, cur().span);
    }
    return toks_[i_++];
  }
  std::string ident() {
    if (cur().kind != Tok::Ident) {
      std::string got = at_end() ? "end of input" : "'" + cur().text + "'";
      throw ParseError("expected identifier but found " + got, cur().span);
    }
    return toks_[i_++].text;
  }
  std::string field_name() {
    // Keywords are fine as field names (`o.proto`, `{this: 1}`).
    if (cur().kind == Tok::Keyword) return toks_[i_++].text;
    return ident();
  }

  struct Stmt {
    enum Kind { Decl, Expression, Return } kind;
    std::string name;
    ExprPtr value;
    Span span;
  };

  bool at_closer(const std::string& closer) const {
    if (closer.empty()) return at_end();
    return is_punct(closer.c_str());
  }

  /// Statement list up to (not including) `closer`, folded into nested Lets.
  ExprPtr statements(const std::string& closer) {
    std::vector<Stmt> list;
    while (accept(";")) {}
    while (!at_closer(closer)) {
      if (at_end()) throw ParseError("expected '" + closer + "' but found end of input", cur().span);
      if (!list.empty() && list.back().kind == Stmt::Return)
        throw ParseError("statement after return", cur().span);
      list.push_back(statement());
      bool separated = false;
      while (accept(";")) separated = true;
      if (!separated && !at_closer(closer) && !cur().newline_before &&
          !(prev().kind == Tok::Punct && prev().text == "}"))
        throw ParseError("expected ';' but found '" + cur().text + "'", cur().span);
    }
    if (list.empty()) return nullptr;
    ExprPtr result;
    for (auto it = list.rbegin(); it != list.rend(); ++it) {
      Stmt& s = *it;
      if (!result) {
        if (s.kind == Stmt::Decl) {
          ExprPtr ref = make_expr(ast::Var{s.name}, s.span);
          result = make_expr(ast::Let{s.name, std::move(s.value), std::move(ref)}, s.span);
        } else {
          result = std::move(s.value);
        }
        continue;
      }
      Span span = join(s.span, result->span);
      std::string name = s.kind == Stmt::Decl ? s.name : kSyntheticName;
      result = make_expr(ast::Let{name, std::move(s.value), std::move(result)}, span);
    }
    return result;
  }

  Stmt statement() {
    Span start = cur().span;
    if (is_kw("var")) {
      ++i_;
      std::string name = ident();
      expect("=");
      ExprPtr value = expression();
      return Stmt{Stmt::Decl, name, std::move(value), join(start, prev().span)};
    }
    if ((is_kw("function") || is_kw("fun")) && toks_[i_ + 1].kind == Tok::Ident) {
      ++i_;
      std::string name = ident();
      ExprPtr fn = lambda_rest(start);
      return Stmt{Stmt::Decl, name, std::move(fn), join(start, prev().span)};
    }
    if (is_kw("return")) {
      ++i_;
      ExprPtr value;
      if (at_end() || is_punct(";") || is_punct("}") || is_punct(")") || cur().newline_before)
        value = make_expr(ast::Null{}, start);
      else
        value = expression();
      return Stmt{Stmt::Return, "", std::move(value), join(start, prev().span)};
    }
    ExprPtr e = expression();
    Span span = e->span;
    return Stmt{Stmt::Expression, "", std::move(e), span};
  }

  ExprPtr expression() { return assignment(); }

  ExprPtr assignment() {
    ExprPtr lhs = conditional();
    if (!is_punct("=")) return lhs;
    Span eq = cur().span;
    ++i_;
    ExprPtr rhs = assignment();
    Span span = join(lhs->span, rhs->span);
    if (lhs->is<ast::Var>())
      return make_expr(ast::VarAssign{lhs->as<ast::Var>().name, std::move(rhs)}, span);
    if (lhs->is<ast::FieldRead>()) {
      auto& fr = lhs->as<ast::FieldRead>();
      return make_expr(ast::FieldWrite{std::move(fr.object), fr.field, std::move(rhs)}, span);
    }
    throw ParseError("invalid assignment target", eq);
  }

  ExprPtr conditional() {
    ExprPtr test = additive();
    if (!accept("?")) return test;
    ExprPtr a = assignment();
    expect(":");
    ExprPtr b = assignment();
    Span span = join(test->span, b->span);
    return make_expr(ast::Cond{std::move(test), std::move(a), std::move(b)}, span);
  }

  ExprPtr additive() {
    ExprPtr lhs = postfix();
    while (accept("+")) {
      ExprPtr rhs = postfix();
      Span span = join(lhs->span, rhs->span);
      lhs = make_expr(ast::Add{std::move(lhs), std::move(rhs)}, span);
    }
    return lhs;
  }

  ExprPtr call_argument() {
    Span open = prev().span;
    if (accept(")")) return make_expr(ast::Null{}, join(open, prev().span));
    ExprPtr arg = expression();
    if (is_punct(",")) throw ParseError("calls take at most one argument", cur().span);
    expect(")");
    return arg;
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    for (;;) {
      if (accept(".")) {
        Span name = cur().span;
        std::string f = field_name();
        if (accept("(")) {
          ExprPtr arg = call_argument();
          Span span = join(e->span, prev().span);
          e = make_expr(ast::MethodCall{std::move(e), f, std::move(arg), join(name, prev().span)}, span);
        } else {
          Span span = join(e->span, prev().span);
          e = make_expr(ast::FieldRead{std::move(e), f}, span);
        }
      } else if (accept("(")) {
        ExprPtr arg = call_argument();
        Span span = join(e->span, prev().span);
        e = make_expr(ast::FunCall{std::move(e), std::move(arg)}, span);
      } else {
        return e;
      }
    }
  }

  ExprPtr lambda_rest(Span start) {
    expect("(");
    std::string param = kSyntheticName;
    if (!is_punct(")")) {
      param = ident();
      if (is_punct(",")) throw ParseError("functions take at most one parameter", cur().span);
    }
    expect(")");
    expect("{");
    ExprPtr body = statements("}");
    expect("}");
    Span span = join(start, prev().span);
    if (!body) body = make_expr(ast::Null{}, span);
    return make_expr(ast::Lambda{param, std::move(body)}, span);
  }

  ExprPtr object_literal() {
    Span start = prev().span;
    std::vector<ast::FieldInit> fields;
    std::set<std::string> seen;
    if (!is_punct("}")) {
      do {
        if (is_punct("}")) break;  // trailing comma
        Span fspan = cur().span;
        std::string name = field_name();
        if (!seen.insert(name).second) throw ParseError("duplicate field '" + name + "'", fspan);
        expect(":");
        ExprPtr value = expression();
        fields.push_back({name, std::move(value), join(fspan, prev().span)});
      } while (accept(","));
    }
    expect("}");
    Span lit = join(start, prev().span);
    if (is_kw("proto")) {
      ++i_;
      ExprPtr parent = postfix();
      Span span = join(start, parent->span);
      return make_expr(ast::ObjLit{std::move(fields), std::move(parent)}, span);
    }
    if (fields.empty()) return make_expr(ast::EmptyObj{}, lit);
    ExprPtr parent = make_expr(ast::EmptyObj{});
    return make_expr(ast::ObjLit{std::move(fields), std::move(parent)}, lit);
  }

  ExprPtr primary() {
    const Token& t = cur();
    Span span = t.span;
    switch (t.kind) {
      case Tok::Int: {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size())
          throw ParseError("integer literal out of range", span);
        ++i_;
        return make_expr(ast::IntLit{v}, span);
      }
      case Tok::Str:
        ++i_;
        return make_expr(ast::StrLit{t.text}, span);
      case Tok::Ident:
        ++i_;
        return make_expr(ast::Var{t.text}, span);
      case Tok::Keyword:
        if (t.text == "null") {
          ++i_;
          return make_expr(ast::Null{}, span);
        }
        if (t.text == "this") {
          ++i_;
          return make_expr(ast::This{}, span);
        }
        if (t.text == "function" || t.text == "fun") {
          ++i_;
          return lambda_rest(span);
        }
        break;
      case Tok::Punct:
        if (t.text == "(") {
          ++i_;
          ExprPtr inner = statements(")");
          if (!inner) throw ParseError("empty parentheses", cur().span);
          expect(")");
          return inner;
        }
        if (t.text == "{") {
          ++i_;
          return object_literal();
        }
        break;
      case Tok::End:
        throw ParseError("unexpected end of input", span);
    }
    throw ParseError("unexpected '" + t.text + "'", span);
  }
};

}  // namespace

ExprPtr parse(const SourceProgram& src) {
  Lexer lexer(src.text);
  Parser parser(lexer.run());
  return parser.program();
}

ExprPtr parse(const std::string& text) { return parse(SourceProgram{text, "<input>"}); }

bool is_blank(const std::string& text) { return Lexer(text).run().front().kind == Tok::End; }

}  // namespace sjs
