#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "netgeom/chart.hpp"
#include "netgeom/expr.hpp"

namespace netgeom {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Arity };
  ParseError(Kind kind, std::size_t offset, const std::string& msg)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}
  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Named univariate functions. Each body is an Expr in one auxiliary
/// variable (index 0); applying a function substitutes its argument.
class FunctionTable {
 public:
  void define(const std::string& name, Expr body);
  bool contains(const std::string& name) const { return fns_.count(name) != 0; }
  const Expr& body(const std::string& name) const { return fns_.at(name); }
  Expr apply(const std::string& name, const Expr& arg) const { return substitute(body(name), 0, arg); }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Expr> fns_;
};

/// Parses `text` against the coordinate names in `names`.
///
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | base ("^" ["-"] number)?
///   base   := number | ident | "(" expr ")" | func "(" expr ")"
Expr parse_expr(std::string_view text, const std::vector<std::string>& names, const FunctionTable& functions = {});
Expr parse_expr(std::string_view text, const Chart& chart, const FunctionTable& functions = {});

}  // namespace netgeom
