#include "netgeom/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace netgeom {

void FunctionTable::define(const std::string& name, Expr body) {
  if (body.max_variable() > 0) throw std::invalid_argument("function " + name + ": body must be univariate");
  fns_[name] = std::move(body);
}

std::vector<std::string> FunctionTable::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : fns_) out.push_back(k);
  return out;
}

namespace {

bool is_builtin(std::string_view name, Op& op) {
  static const std::pair<std::string_view, Op> table[] = {
      {"exp", Op::Exp},   {"log", Op::Log},   {"sin", Op::Sin},   {"cos", Op::Cos}, {"tan", Op::Tan},
      {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs},
  };
  for (const auto& [n, o] : table)
    if (n == name) {
      op = o;
      return true;
    }
  return false;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& names, const FunctionTable& fns)
      : s_(text), names_(names), fns_(fns) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) syntax("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void syntax(const std::string& msg) { throw ParseError(ParseError::Kind::Syntax, pos_, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      skip_ws();
      syntax(pos_ == s_.size() ? std::string("unexpected end of input, expected '") + c + "'"
                               : std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) lhs = lhs + term();
      else if (accept('-')) lhs = lhs - term();
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) lhs = lhs * factor();
      else if (accept('/')) lhs = lhs / factor();
      else return lhs;
    }
  }

  Expr factor() {
    if (accept('-')) return -factor();
    Expr b = base();
    if (accept('^')) {
      bool neg = accept('-');
      skip_ws();
      double v = number();
      return pow(b, neg ? -v : v);
    }
    return b;
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && s_[start] == '.')) {
      pos_ = start;
      syntax(start == s_.size() ? "unexpected end of input, expected a number" : "expected a number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      std::size_t digits = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == digits) pos_ = save;
    }
    std::string tok(s_.substr(start, pos_ - start));
    return std::strtod(tok.c_str(), nullptr);
  }

  Expr base() {
    skip_ws();
    if (pos_ >= s_.size()) syntax("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(number());
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string ident(s_.substr(start, pos_ - start));
      Op op = Op::Exp;
      bool builtin = is_builtin(ident, op);
      if (builtin || fns_.contains(ident)) {
        std::vector<Expr> args = call_args(ident);
        if (args.size() != 1)
          throw ParseError(ParseError::Kind::Arity, start,
                           "function " + ident + " takes 1 argument, got " + std::to_string(args.size()));
        return builtin ? unary(op, args[0]) : fns_.apply(ident, args[0]);
      }
      for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == ident) return Expr::variable(static_cast<int>(i));
      throw ParseError(ParseError::Kind::UnknownIdentifier, start, "unknown identifier '" + ident + "'");
    }
    syntax("unexpected character '" + std::string(1, c) + "'");
  }

  std::vector<Expr> call_args(const std::string& name) {
    if (!accept('(')) syntax("expected '(' after " + name);
    std::vector<Expr> args;
    if (accept(')')) return args;
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    expect(')');
    return args;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const std::vector<std::string>& names_;
  const FunctionTable& fns_;
};

}  // namespace

Expr parse_expr(std::string_view text, const std::vector<std::string>& names, const FunctionTable& functions) {
  return Parser(text, names, functions).parse();
}

Expr parse_expr(std::string_view text, const Chart& chart, const FunctionTable& functions) {
  return parse_expr(text, chart.names(), functions);
}

}  // namespace netgeom
