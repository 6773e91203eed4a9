#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace netgeom {

/// Raised when an expression is evaluated outside the domain of one of its
/// operations (log/sqrt of a non-positive number, division by zero, ...).
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subexpr)
      : std::runtime_error(what + " in `" + subexpr + "`"), subexpr_(std::move(subexpr)) {}
  const std::string& subexpression() const { return subexpr_; }

 private:
  std::string subexpr_;
};

enum class Op {
  Const,
  Var,
  Neg,
  Exp,
  Log,
  Sin,
  Cos,
  Tan,
  Sinh,
  Cosh,
  Sqrt,
  Abs,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // base ^ constant exponent (stored in `value`)
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  double value = 0.0;  // Const: the constant; Pow: the exponent
  int var = -1;        // Var: coordinate index
  NodePtr a, b;
};

/// Closed-form scalar field over chart coordinates.
///
/// Immutable; copies share structure. All operations are pure, so the same
/// Expr may be evaluated from many threads at once.
class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  static Expr constant(double c);
  static Expr variable(int index);

  Op op() const { return node_->op; }
  const Node& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }
  Expr lhs() const { return Expr(node_->a); }
  Expr rhs() const { return Expr(node_->b); }

  bool is_constant() const { return node_->op == Op::Const; }
  bool is_constant(double c) const { return is_constant() && node_->value == c; }
  double constant_value() const { return node_->value; }

  /// Longest root-to-leaf path, counting both ends.
  int depth() const;
  /// Coordinate indices the expression mentions.
  std::set<int> variables() const;
  int max_variable() const;

  double eval(std::span<const double> p) const;
  double eval(const Eigen::VectorXd& p) const { return eval(std::span<const double>(p.data(), p.size())); }

  /// Fully parenthesised text that parses back to an equivalent expression.
  std::string str(std::span<const std::string> names = {}) const;

 private:
  NodePtr node_;
};

// Smart constructors. They fold constants and the 0/1 identities and nothing
// more; equality of expressions is judged by evaluation.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(double a, const Expr& b);
Expr operator+(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator*(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator/(double a, const Expr& b);
Expr operator/(const Expr& a, double b);
Expr pow(const Expr& base, double exponent);
Expr unary(Op op, const Expr& arg);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);
Expr sinh(const Expr& e);
Expr cosh(const Expr& e);
Expr sqrt(const Expr& e);
Expr abs(const Expr& e);

/// Exact symbolic partial derivative with respect to coordinate `index`.
Expr diff(const Expr& e, int index);

/// Replaces every occurrence of variable `index` by `replacement`.
Expr substitute(const Expr& e, int index, const Expr& replacement);

/// Value, coordinate gradient and coordinate Hessian at a point.
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// An expression bundled with its symbolic first and second partials.
/// Building the table once lets repeated evaluations skip differentiation.
class DiffTable {
 public:
  DiffTable() = default;
  DiffTable(Expr f, int dim);

  const Expr& expr() const { return f_; }
  int dim() const { return dim_; }
  const Expr& d(int i) const { return d1_[i]; }
  const Expr& dd(int i, int j) const;

  double value(std::span<const double> p) const { return f_.eval(p); }
  Jet2 jet2(std::span<const double> p) const;
  /// Value and gradient only.
  Jet2 jet1(std::span<const double> p) const;

 private:
  Expr f_;
  int dim_ = 0;
  std::vector<Expr> d1_;
  std::vector<Expr> d2_;  // upper triangle, row-major
};

Jet2 eval_jet2(const Expr& e, const Eigen::VectorXd& p);

struct FiniteDifference {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// Central-difference gradient and Hessian. `lo`/`hi` bound the domain box;
/// throws std::invalid_argument when the stencil would leave it.
FiniteDifference fd_oracle(const Expr& e, const Eigen::VectorXd& p, double h,
                           const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

std::string format_number(double v);

}  // namespace netgeom
