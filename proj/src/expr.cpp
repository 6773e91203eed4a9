#include "netgeom/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace netgeom {

namespace {

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0, int var = -1) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = value;
  n->var = var;
  return n;
}

const char* unary_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    default: return "?";
  }
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

// Numeric kernel of a unary op; throws DomainError via the caller-supplied
// expression when the argument is outside the op's domain.
double apply_unary(Op op, double x, const Node& at) {
  auto fail = [&](const char* why) -> double { throw DomainError(why, Expr(std::make_shared<Node>(at)).str()); };
  switch (op) {
    case Op::Neg: return -x;
    case Op::Exp: return std::exp(x);
    case Op::Log:
      if (!(x > 0.0)) return fail("log of non-positive value");
      return std::log(x);
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Tan: {
      if (std::cos(x) == 0.0) return fail("tan at a pole");
      return std::tan(x);
    }
    case Op::Sinh: return std::sinh(x);
    case Op::Cosh: return std::cosh(x);
    case Op::Sqrt:
      if (x < 0.0) return fail("sqrt of negative value");
      return std::sqrt(x);
    case Op::Abs: return std::abs(x);
    default: return fail("not a unary op");
  }
}

double eval_node(const Node& n, std::span<const double> p) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:
      if (n.var < 0 || static_cast<std::size_t>(n.var) >= p.size())
        throw std::out_of_range("variable x" + std::to_string(n.var) + " outside point dimension");
      return p[n.var];
    case Op::Add: return eval_node(*n.a, p) + eval_node(*n.b, p);
    case Op::Sub: return eval_node(*n.a, p) - eval_node(*n.b, p);
    case Op::Mul: return eval_node(*n.a, p) * eval_node(*n.b, p);
    case Op::Div: {
      double den = eval_node(*n.b, p);
      if (den == 0.0) throw DomainError("division by zero", Expr(std::make_shared<Node>(n)).str());
      return eval_node(*n.a, p) / den;
    }
    case Op::Pow: {
      double base = eval_node(*n.a, p);
      if (!is_integer(n.value)) {
        if (base < 0.0 || (base == 0.0 && n.value < 0.0))
          throw DomainError("non-integer power of non-positive value", Expr(std::make_shared<Node>(n)).str());
      } else if (base == 0.0 && n.value < 0.0) {
        throw DomainError("negative power of zero", Expr(std::make_shared<Node>(n)).str());
      }
      return std::pow(base, n.value);
    }
    default: return apply_unary(n.op, eval_node(*n.a, p), n);
  }
}

int depth_of(const Node& n) {
  int d = 0;
  if (n.a) d = std::max(d, depth_of(*n.a));
  if (n.b) d = std::max(d, depth_of(*n.b));
  return d + 1;
}

void collect_vars(const Node& n, std::set<int>& out) {
  if (n.op == Op::Var) out.insert(n.var);
  if (n.a) collect_vars(*n.a, out);
  if (n.b) collect_vars(*n.b, out);
}

void print(const Node& n, std::span<const std::string> names, std::string& out) {
  switch (n.op) {
    case Op::Const: {
      std::string s = format_number(n.value);
      if (n.value < 0 || s[0] == '-') out += "(" + s + ")";
      else out += s;
      return;
    }
    case Op::Var:
      if (static_cast<std::size_t>(n.var) < names.size()) out += names[n.var];
      else out += "x" + std::to_string(n.var);
      return;
    case Op::Neg:
      out += "(-";
      print(*n.a, names, out);
      out += ")";
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? " * " : " / ";
      out += "(";
      print(*n.a, names, out);
      out += sym;
      print(*n.b, names, out);
      out += ")";
      return;
    }
    case Op::Pow:
      out += "(";
      print(*n.a, names, out);
      out += "^" + format_number(n.value) + ")";
      return;
    default:
      out += unary_name(n.op);
      out += "(";
      print(*n.a, names, out);
      out += ")";
      return;
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Expr::Expr() : node_(make(Op::Const)) {}

Expr Expr::constant(double c) { return Expr(make(Op::Const, nullptr, nullptr, c)); }
Expr Expr::variable(int index) { return Expr(make(Op::Var, nullptr, nullptr, 0.0, index)); }

int Expr::depth() const { return depth_of(*node_); }

std::set<int> Expr::variables() const {
  std::set<int> out;
  collect_vars(*node_, out);
  return out;
}

int Expr::max_variable() const {
  auto v = variables();
  return v.empty() ? -1 : *v.rbegin();
}

double Expr::eval(std::span<const double> p) const { return eval_node(*node_, p); }

std::string Expr::str(std::span<const std::string> names) const {
  std::string out;
  print(*node_, names, out);
  return out;
}

// ---- smart constructors ----------------------------------------------------

namespace {

Expr fold_or(Op op, const Expr& a, const Expr& b, double folded) {
  if (std::isfinite(folded)) return Expr::constant(folded);
  return Expr(make(op, a.ptr(), b.ptr()));
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return fold_or(Op::Add, a, b, a.constant_value() + b.constant_value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr(make(Op::Add, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return fold_or(Op::Sub, a, b, a.constant_value() - b.constant_value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr(make(Op::Sub, a.ptr(), b.ptr()));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return fold_or(Op::Mul, a, b, a.constant_value() * b.constant_value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return Expr(make(Op::Mul, a.ptr(), b.ptr()));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
    return fold_or(Op::Div, a, b, a.constant_value() / b.constant_value());
  return Expr(make(Op::Div, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.constant_value());
  if (a.op() == Op::Neg) return a.lhs();
  return Expr(make(Op::Neg, a.ptr()));
}

Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }
Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }

Expr pow(const Expr& base, double exponent) {
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) {
    double b = base.constant_value();
    bool ok = is_integer(exponent) ? !(b == 0.0 && exponent < 0.0) : b > 0.0;
    if (ok) {
      double v = std::pow(b, exponent);
      if (std::isfinite(v)) return Expr::constant(v);
    }
  }
  return Expr(make(Op::Pow, base.ptr(), nullptr, exponent));
}

Expr unary(Op op, const Expr& arg) {
  if (op == Op::Neg) return -arg;
  if (arg.is_constant()) {
    try {
      Node tmp;
      tmp.op = op;
      tmp.a = arg.ptr();
      double v = apply_unary(op, arg.constant_value(), tmp);
      if (std::isfinite(v)) return Expr::constant(v);
    } catch (const DomainError&) {
      // keep symbolic; the error surfaces at evaluation time
    }
  }
  return Expr(make(op, arg.ptr()));
}

Expr exp(const Expr& e) { return unary(Op::Exp, e); }
Expr log(const Expr& e) { return unary(Op::Log, e); }
Expr sin(const Expr& e) { return unary(Op::Sin, e); }
Expr cos(const Expr& e) { return unary(Op::Cos, e); }
Expr tan(const Expr& e) { return unary(Op::Tan, e); }
Expr sinh(const Expr& e) { return unary(Op::Sinh, e); }
Expr cosh(const Expr& e) { return unary(Op::Cosh, e); }
Expr sqrt(const Expr& e) { return unary(Op::Sqrt, e); }
Expr abs(const Expr& e) { return unary(Op::Abs, e); }

// ---- differentiation --------------------------------------------------------

Expr diff(const Expr& e, int index) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Const: return Expr::constant(0.0);
    case Op::Var: return Expr::constant(n.var == index ? 1.0 : 0.0);
    case Op::Neg: return -diff(e.lhs(), index);
    case Op::Add: return diff(e.lhs(), index) + diff(e.rhs(), index);
    case Op::Sub: return diff(e.lhs(), index) - diff(e.rhs(), index);
    case Op::Mul: {
      Expr a = e.lhs(), b = e.rhs();
      return diff(a, index) * b + a * diff(b, index);
    }
    case Op::Div: {
      Expr a = e.lhs(), b = e.rhs();
      Expr da = diff(a, index), db = diff(b, index);
      if (db.is_constant(0.0)) return da / b;
      return (da * b - a * db) / pow(b, 2.0);
    }
    case Op::Pow: {
      Expr u = e.lhs();
      Expr du = diff(u, index);
      if (du.is_constant(0.0)) return Expr::constant(0.0);
      return n.value * pow(u, n.value - 1.0) * du;
    }
    default: break;
  }
  Expr u = e.lhs();
  Expr du = diff(u, index);
  if (du.is_constant(0.0)) return Expr::constant(0.0);
  switch (n.op) {
    case Op::Exp: return e * du;
    case Op::Log: return du / u;
    case Op::Sin: return cos(u) * du;
    case Op::Cos: return -(sin(u) * du);
    case Op::Tan: return du / pow(cos(u), 2.0);
    case Op::Sinh: return cosh(u) * du;
    case Op::Cosh: return sinh(u) * du;
    case Op::Sqrt: return du / (2.0 * e);
    case Op::Abs: return (u / e) * du;
    default: throw std::logic_error("diff: unhandled op");
  }
}

Expr substitute(const Expr& e, int index, const Expr& replacement) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Const: return e;
    case Op::Var: return n.var == index ? replacement : e;
    case Op::Add: return substitute(e.lhs(), index, replacement) + substitute(e.rhs(), index, replacement);
    case Op::Sub: return substitute(e.lhs(), index, replacement) - substitute(e.rhs(), index, replacement);
    case Op::Mul: return substitute(e.lhs(), index, replacement) * substitute(e.rhs(), index, replacement);
    case Op::Div: return substitute(e.lhs(), index, replacement) / substitute(e.rhs(), index, replacement);
    case Op::Pow: return pow(substitute(e.lhs(), index, replacement), n.value);
    default: return unary(n.op, substitute(e.lhs(), index, replacement));
  }
}

// ---- jets -------------------------------------------------------------------

DiffTable::DiffTable(Expr f, int dim) : f_(std::move(f)), dim_(dim) {
  d1_.reserve(dim);
  for (int i = 0; i < dim; ++i) d1_.push_back(diff(f_, i));
  d2_.reserve(dim * (dim + 1) / 2);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) d2_.push_back(diff(d1_[i], j));
}

const Expr& DiffTable::dd(int i, int j) const {
  if (i > j) std::swap(i, j);
  return d2_[i * dim_ - i * (i - 1) / 2 + (j - i)];
}

Jet2 DiffTable::jet1(std::span<const double> p) const {
  Jet2 out;
  out.value = f_.eval(p);
  out.grad.resize(dim_);
  for (int i = 0; i < dim_; ++i) out.grad[i] = d1_[i].eval(p);
  return out;
}

Jet2 DiffTable::jet2(std::span<const double> p) const {
  Jet2 out = jet1(p);
  out.hess.resize(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      double v = dd(i, j).eval(p);
      out.hess(i, j) = v;
      out.hess(j, i) = v;
    }
  return out;
}

Jet2 eval_jet2(const Expr& e, const Eigen::VectorXd& p) {
  DiffTable t(e, static_cast<int>(p.size()));
  return t.jet2(std::span<const double>(p.data(), p.size()));
}

// ---- finite differences -----------------------------------------------------

namespace {

// Step actually realised by x + h in floating point, so that x +- h are exact.
double representable_step(double x, double h) {
  volatile double t = x + h;
  return t - x;
}

}  // namespace

FiniteDifference fd_oracle(const Expr& e, const Eigen::VectorXd& p, double h, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(p.size());
  if (!(h > 0.0)) throw std::invalid_argument("fd_oracle: step must be positive");
  Eigen::VectorXd step(n);
  for (int i = 0; i < n; ++i) {
    step[i] = representable_step(p[i], h);
    if (p[i] - step[i] < lo[i] || p[i] + step[i] > hi[i])
      throw std::invalid_argument("fd_oracle: step " + format_number(h) + " leaves the domain along axis " +
                                  std::to_string(i));
  }
  auto f = [&](const Eigen::VectorXd& q) { return e.eval(q); };
  FiniteDifference out;
  out.grad.resize(n);
  out.hess.resize(n, n);
  const double f0 = f(p);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd qp = p, qm = p;
    qp[i] += step[i];
    qm[i] -= step[i];
    double fp = f(qp), fm = f(qm);
    out.grad[i] = (fp - fm) / (2.0 * step[i]);
    out.hess(i, i) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd q = p;
      double acc = 0.0;
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          q[i] = p[i] + si * step[i];
          q[j] = p[j] + sj * step[j];
          acc += si * sj * f(q);
        }
      double v = acc / (4.0 * step[i] * step[j]);
      out.hess(i, j) = v;
      out.hess(j, i) = v;
    }
  return out;
}

}  // namespace netgeom
