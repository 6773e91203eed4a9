#include "netgeom/codazzi.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "netgeom/detail/kernels.hpp"

namespace netgeom {

SymTensorField::SymTensorField(const Chart& chart, const std::vector<std::vector<Expr>>& components)
    : n_(chart.dim()) {
  if (static_cast<int>(components.size()) != n_) throw std::invalid_argument("tensor: wrong number of rows");
  for (const auto& row : components) {
    if (static_cast<int>(row.size()) != n_) throw std::invalid_argument("tensor: wrong number of columns");
    for (const auto& e : row) {
      if (e.max_variable() >= n_) throw std::invalid_argument("tensor: entry mentions an unknown coordinate");
      tables_.emplace_back(e, n_);
    }
  }
}

SymTensorField SymTensorField::diagonal(const Chart& chart, const std::vector<Expr>& diag) {
  const int n = chart.dim();
  if (static_cast<int>(diag.size()) != n) throw std::invalid_argument("tensor: wrong diagonal length");
  std::vector<std::vector<Expr>> c(n, std::vector<Expr>(n, Expr::constant(0.0)));
  for (int i = 0; i < n; ++i) c[i][i] = diag[i];
  return SymTensorField(chart, c);
}

Matrix SymTensorField::at(const Point& p) const {
  Matrix m(n_, n_);
  for (int k = 0; k < n_; ++k)
    for (int l = 0; l < n_; ++l) m(k, l) = component(k, l).eval(p);
  return m;
}

std::vector<std::vector<Expr>> SymTensorField::components() const {
  std::vector<std::vector<Expr>> c(n_, std::vector<Expr>(n_));
  for (int k = 0; k < n_; ++k)
    for (int l = 0; l < n_; ++l) c[k][l] = component(k, l);
  return c;
}

namespace {

std::string where(const Point& p) {
  std::string s = "(";
  for (int i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_number(p[i]);
  return s + ")";
}

void check_dims(const MetricField& g, const SymTensorField& phi) {
  if (g.dim() != phi.dim()) throw std::invalid_argument("tensor and metric dimensions differ");
}

}  // namespace

double self_adjoint_defect(const MetricField& g, const SymTensorField& phi, const Point& p) {
  check_dims(g, phi);
  const MetricAt m = metric_at(g, p);
  const Matrix A = m.g * phi.at(p);
  return (A - A.transpose()).cwiseAbs().maxCoeff() / std::max(1.0, A.cwiseAbs().maxCoeff());
}

double codazzi_residual(const MetricField& g, const SymTensorField& phi, const Point& p, double sa_tol) {
  const double defect = self_adjoint_defect(g, phi, p);
  if (defect > sa_tol)
    throw CodazziError("tensor is not self-adjoint at " + where(p) + " (defect " + format_number(defect) + ")");
  const int n = g.dim();
  const auto geo = detail::geometry_double(g, p);
  const std::span<const double> ps(p.data(), static_cast<std::size_t>(n));
  Matrix P(n, n);
  std::vector<Matrix> dP(n, Matrix(n, n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const Jet2 j = phi.table(k, l).jet1(ps);
      P(k, l) = j.value;
      for (int a = 0; a < n; ++a) dP[a](k, l) = j.grad[a];
    }
  // (nabla_a Phi)^k_b
  auto nabla = [&](int a, int k, int b) {
    double v = dP[a](k, b);
    for (int m = 0; m < n; ++m) v += geo.G(k, a, m) * P(m, b) - P(k, m) * geo.G(m, a, b);
    return v;
  };
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      detail::Vec<double> c(n);
      for (int k = 0; k < n; ++k) c[k] = nabla(a, k, b) - nabla(b, k, a);
      worst = std::max(worst, detail::norm(geo.g, c) / std::sqrt(geo.g(a, a) * geo.g(b, b)));
    }
  return worst;
}

EigenPair eigen_two(const MetricField& g, const SymTensorField& phi, const Point& p, double gap_min,
                    std::optional<double> track) {
  check_dims(g, phi);
  const MetricAt m = metric_at(g, p);
  const int n = g.dim();
  Matrix A = m.g * phi.at(p);
  A = 0.5 * (A + A.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(A, m.g);
  if (es.info() != Eigen::Success) throw CodazziError("eigen decomposition failed at " + where(p));
  const Vector& ev = es.eigenvalues();

  std::vector<int> cuts;
  for (int i = 0; i + 1 < n; ++i)
    if (ev[i + 1] - ev[i] >= gap_min) cuts.push_back(i);
  if (cuts.empty()) throw CoalescenceError("eigenvalue coalescence at " + where(p) + ": a single eigenvalue cluster");
  if (cuts.size() > 1)
    throw CoalescenceError("eigenvalue coalescence at " + where(p) + ": " + std::to_string(cuts.size() + 1) +
                           " eigenvalue clusters");
  const int cut = cuts[0];

  double lo = 0.0, hi = 0.0;
  for (int i = 0; i <= cut; ++i) lo += ev[i];
  for (int i = cut + 1; i < n; ++i) hi += ev[i];
  lo /= cut + 1;
  hi /= n - cut - 1;

  bool low_is_lambda;
  if (track) {
    low_is_lambda = std::abs(*track - lo) <= std::abs(*track - hi);
  } else {
    // share of d_0 carried by each eigenspace
    double w_lo = 0.0, w_hi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = es.eigenvectors().col(i).dot(m.g.col(0));
      (i <= cut ? w_lo : w_hi) += c * c;
    }
    low_is_lambda = w_lo >= w_hi;
  }

  EigenPair out;
  out.lambda = low_is_lambda ? lo : hi;
  out.mu = low_is_lambda ? hi : lo;
  out.gap = hi - lo;
  for (int i = 0; i < n; ++i) {
    const bool in_low = i <= cut;
    (in_low == low_is_lambda ? out.basis_lambda : out.basis_mu).push_back(es.eigenvectors().col(i));
  }
  return out;
}

namespace {

// Picks `r` columns of P that stay g-independent at the reference point.
std::vector<int> pick_columns(const Matrix& P, const Matrix& g, int r) {
  const int n = static_cast<int>(P.rows());
  std::vector<int> chosen;
  std::vector<Vector> ortho;
  for (int step = 0; step < r; ++step) {
    int best = -1;
    double best_norm = -1.0;
    Vector best_vec;
    for (int c = 0; c < n; ++c) {
      if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
      Vector v = P.col(c);
      for (const auto& o : ortho) v -= o.dot(g * v) * o;
      const double nv = std::sqrt(std::max(0.0, v.dot(g * v)));
      if (nv > best_norm) {
        best_norm = nv;
        best = c;
        best_vec = v;
      }
    }
    if (best_norm <= 1e-10) throw CodazziError("eigenbundle projector has lower rank than expected");
    chosen.push_back(best);
    ortho.push_back(best_vec / best_norm);
  }
  return chosen;
}

}  // namespace

EigenStructure eigen_structure(const MetricField& g, const SymTensorField& phi, const Point& ref, double gap_min) {
  const EigenPair ep = eigen_two(g, phi, ref, gap_min);
  const int n = g.dim();
  const int r = static_cast<int>(ep.basis_lambda.size());
  const double sgn = ep.lambda > ep.mu ? 1.0 : -1.0;

  // lambda, mu from tr Phi and tr Phi^2, given the multiplicities
  Expr s1 = Expr::constant(0.0), s2 = Expr::constant(0.0);
  for (int k = 0; k < n; ++k) {
    s1 = s1 + phi.component(k, k);
    for (int l = 0; l < n; ++l) s2 = s2 + phi.component(k, l) * phi.component(l, k);
  }
  const double dn = n, dr = r;
  const Expr mean = s1 / dn;
  const Expr var = s2 / dn - pow(mean, 2.0);
  const Expr spread = sqrt(var * (dn * dn / (dr * (dn - dr))));  // |lambda - mu|
  const Expr lambda = mean + sgn * ((dn - dr) / dn) * spread;
  const Expr mu = mean - sgn * (dr / dn) * spread;

  // frame: selected columns of the eigenprojectors
  const Expr diff_lm = lambda - mu;
  std::vector<std::vector<Expr>> Pl(n, std::vector<Expr>(n)), Pm(n, std::vector<Expr>(n));
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a) {
      const Expr delta = Expr::constant(k == a ? 1.0 : 0.0);
      Pl[k][a] = (phi.component(k, a) - mu * delta) / diff_lm;
      Pm[k][a] = (lambda * delta - phi.component(k, a)) / diff_lm;
    }
  const MetricAt m = metric_at(g, ref);
  auto numeric = [&](const std::vector<std::vector<Expr>>& P) {
    Matrix out(n, n);
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < n; ++a) out(k, a) = P[k][a].eval(ref);
    return out;
  };
  std::vector<VectorField> frame;
  auto add = [&](const std::vector<std::vector<Expr>>& P, int rank) {
    for (int a : pick_columns(numeric(P), m.g, rank)) {
      std::vector<Expr> col(n);
      for (int k = 0; k < n; ++k) col[k] = P[k][a];
      frame.emplace_back(col, n);
    }
  };
  add(Pl, r);
  add(Pm, n - r);
  IndexSet b0, b1;
  for (int a = 0; a < n; ++a) (a < r ? b0 : b1).push_back(a);

  EigenStructure es{r, n - r, lambda, mu, OrthogonalNet(g.chart(), std::move(frame), {b0, b1})};
  return es;
}

namespace {

double along(const Vector& X, const Vector& grad) { return X.dot(grad); }

}  // namespace

CriteriaRecord criteria_residuals(const MetricField& g, const SymTensorField& phi, const EigenStructure& es,
                                  const Point& p, double tol, const std::optional<Expr>& h_of_mu, double gap_min) {
  CriteriaRecord rec;
  rec.p = p;
  const double lam_track = es.lambda.eval(p);
  const EigenPair ep = eigen_two(g, phi, p, gap_min, lam_track);
  if (static_cast<int>(ep.basis_lambda.size()) != es.rank_lambda)
    throw CodazziError("eigenbundle rank changes at " + where(p));
  const double lam = ep.lambda, mu = ep.mu, dlm = lam - mu;
  rec.lambda = lam;
  rec.mu = mu;

  const MetricAt m = metric_at(g, p);
  const Matrix Phi = phi.at(p);
  const Jet2 jl = eval_jet2(es.lambda, p), jm = eval_jet2(es.mu, p);
  const Matrix Hl = hessian_lc(g, es.lambda, p), Hm = hessian_lc(g, es.mu, p);
  const Vector grad_l = m.inverse * jl.grad, grad_m = m.inverse * jm.grad;
  auto gnorm = [&](const Vector& v) { return std::sqrt(std::max(0.0, v.dot(m.g * v))); };
  auto proj = [&](const std::vector<Vector>& basis, const Vector& v) {
    Vector out = Vector::Zero(v.size());
    for (const auto& b : basis) out += b.dot(m.g * v) * b;
    return out;
  };

  const SubsetGeometry El = subset_geometry(g, es.net, es.net.block(0), p);
  const SubsetGeometry Em = subset_geometry(g, es.net, es.net.block(1), p);
  const Vector& eta = El.H;
  const Vector& zeta = Em.H;
  const auto geod = detail::geometry_double(g, p);

  const Vector gl_mu = proj(ep.basis_mu, grad_l);
  const Vector gm_lam = proj(ep.basis_lambda, grad_m);
  rec.mcn = gnorm((lam * Matrix::Identity(g.dim(), g.dim()) - Phi) * eta - gl_mu);
  rec.pns = std::max(gnorm(eta - gl_mu / dlm), gnorm(zeta + gm_lam / dlm));
  rec.grad_lambda_on_lambda = gnorm(proj(ep.basis_lambda, grad_l));
  rec.grad_mu_on_mu = gnorm(proj(ep.basis_mu, grad_m));
  rec.grad_lambda = gnorm(grad_l);
  rec.grad_mu = gnorm(grad_m);
  rec.sphericity_lambda = El.sphericity;

  const bool cp_ok = std::abs(lam + mu) >= tol;
  std::optional<Jet2> ja, jb;
  Matrix Ha;
  if (cp_ok) {
    const Expr alpha = 0.5 * (es.lambda + es.mu);
    const Expr beta = (es.mu - es.lambda) / (es.mu + es.lambda);
    ja = eval_jet2(alpha, p);
    jb = eval_jet2(beta, p);
    Ha = hessian_lc(g, alpha, p);
    rec.cpnet = 0.0;
  }

  const detail::Vec<double> etav = detail::to_vec(eta), zetav = detail::to_vec(zeta);
  const auto deta = detail::from_eigen(El.dH), dzeta = detail::from_eigen(Em.dH);
  for (const Vector& X : ep.basis_lambda)
    for (const Vector& Y : ep.basis_mu) {
      const double Xl = along(X, jl.grad), Yl = along(Y, jl.grad);
      const double Xm = along(X, jm.grad), Ym = along(Y, jm.grad);
      const double m1 = 2 * Xm * Ym - Xm * Yl + dlm * X.dot(Hm * Y);
      const double m2 = 2 * Xl * Yl - Xm * Yl - dlm * X.dot(Hl * Y);
      rec.mulambda1 = std::max(rec.mulambda1, std::abs(m1));
      rec.mulambda2 = std::max(rec.mulambda2, std::abs(m2));

      const auto xv = detail::to_vec(X), yv = detail::to_vec(Y);
      const double lhs1 = detail::inner(geod.g, detail::cov_deriv(geod, xv, etav, deta), yv);
      const double lhs2 = detail::inner(geod.g, detail::cov_deriv(geod, yv, zetav, dzeta), xv);
      rec.s1 = std::max(rec.s1, std::abs(lhs1 + m2 / (dlm * dlm)));
      rec.s2 = std::max(rec.s2, std::abs(lhs2 + m1 / (dlm * dlm)));

      if (cp_ok) {
        const double a = ja->value, b = jb->value;
        const double Xa = along(X, ja->grad), Ya = along(Y, ja->grad);
        const double Xb = along(X, jb->grad), Yb = along(Y, jb->grad);
        const double v = 2 * b * Xa * Ya + a * Xa * Yb + a * Ya * Xb - a * b * X.dot(Ha * Y);
        rec.cpnet = std::max(*rec.cpnet, std::abs(v));
      }
    }

  if (h_of_mu) {
    const double hv = h_of_mu->eval(p);
    rec.h_residual = std::abs(lam - hv);
    if (es.rank_lambda == 1) {
      const Vector& T = ep.basis_lambda[0];
      rec.tilmu = std::abs(along(T, jm.grad) + (hv - mu) * T.dot(m.g * zeta));
    }
  }
  return rec;
}

CriteriaRecord criteria_residuals(const MetricField& g, const SymTensorField& phi, const Point& p, double tol) {
  const EigenStructure es = eigen_structure(g, phi, p);
  return criteria_residuals(g, phi, es, p, tol, std::nullopt);
}

std::string to_string(WarpedCase c) {
  switch (c) {
    case WarpedCase::NotRequested: return "not-requested";
    case WarpedCase::CaseI: return "case-i";
    case WarpedCase::CaseII: return "case-ii";
    case WarpedCase::Outside: return "outside-hypotheses";
  }
  return "?";
}

CodazziReport classify_codazzi(const MetricField& g, const SymTensorField& phi, const std::optional<Expr>& h,
                               const std::vector<Point>& samples, double tol, double gap_min) {
  if (samples.empty()) throw std::invalid_argument("classify_codazzi: no sample points");
  if (h && h->max_variable() > 0) throw std::invalid_argument("h must be a function of one variable");
  CodazziReport rep;
  rep.tolerance = tol;
  for (const auto& p : samples) {
    rep.self_adjoint_defect = std::max(rep.self_adjoint_defect, self_adjoint_defect(g, phi, p));
    rep.codazzi_residual = std::max(rep.codazzi_residual, codazzi_residual(g, phi, p, std::max(tol, 1e-10)));
  }
  if (rep.codazzi_residual > tol)
    throw CodazziError("input is not a Codazzi tensor: residual " + format_number(rep.codazzi_residual));

  const EigenStructure es = eigen_structure(g, phi, samples.front(), gap_min);
  rep.rank_lambda = es.rank_lambda;
  rep.rank_mu = es.rank_mu;
  std::optional<Expr> h_of_mu;
  if (h) h_of_mu = substitute(*h, 0, es.mu);

  for (const auto& p : samples) rep.points.push_back(criteria_residuals(g, phi, es, p, tol, h_of_mu, gap_min));

  double gl_on_l = 0, gm_on_m = 0, gl = 0, gm = 0;
  for (const auto& r : rep.points) {
    rep.mcn = std::max(rep.mcn, r.mcn);
    rep.mulambda1 = std::max(rep.mulambda1, r.mulambda1);
    rep.mulambda2 = std::max(rep.mulambda2, r.mulambda2);
    rep.s1 = std::max(rep.s1, r.s1);
    rep.s2 = std::max(rep.s2, r.s2);
    rep.pns = std::max(rep.pns, r.pns);
    if (r.cpnet) rep.cpnet = std::max(rep.cpnet.value_or(0.0), *r.cpnet);
    else ++rep.cpnet_skipped;
    gl_on_l = std::max(gl_on_l, r.grad_lambda_on_lambda);
    gm_on_m = std::max(gm_on_m, r.grad_mu_on_mu);
    gl = std::max(gl, r.grad_lambda);
    gm = std::max(gm, r.grad_mu);
    if (r.h_residual) rep.h_residual = std::max(rep.h_residual.value_or(0.0), *r.h_residual);
    if (r.tilmu) rep.tilmu_residual = std::max(rep.tilmu_residual.value_or(0.0), *r.tilmu);
  }

  // an eigenvalue of multiplicity >= 2 is constant along its eigenbundle
  if (rep.rank_lambda >= 2 && verdict_of(gl_on_l, tol) == Verdict::Fails)
    throw CodazziError("inconsistent eigenstructure: rank(E_lambda) >= 2 but lambda varies along E_lambda (" +
                       format_number(gl_on_l) + ")");
  if (rep.rank_mu >= 2 && verdict_of(gm_on_m, tol) == Verdict::Fails)
    throw CodazziError("inconsistent eigenstructure: rank(E_mu) >= 2 but mu varies along E_mu (" +
                       format_number(gm_on_m) + ")");

  if (rep.cpnet) {
    rep.isothermic = verdict_of(*rep.cpnet, tol);
    if (rep.cpnet_skipped) rep.isothermic = combine(rep.isothermic, Verdict::Inconclusive);
  }
  rep.mulambda_both = combine(verdict_of(rep.mulambda1, tol), verdict_of(rep.mulambda2, tol));

  rep.net = classify_net(g, es.net, samples, tol);
  rep.cp_net = rep.net.flag("CP").verdict;
  const bool either = verdict_of(rep.mulambda1, tol) == Verdict::Holds || verdict_of(rep.mulambda2, tol) == Verdict::Holds;
  const bool definite = rep.cp_net != Verdict::Inconclusive && rep.mulambda_both != Verdict::Inconclusive;
  if (either && definite && (rep.cp_net == Verdict::Holds) != (rep.mulambda_both == Verdict::Holds))
    rep.inconsistencies.push_back("CP classification of the eigenbundle net disagrees with the eigenvalue criteria");

  if (h) {
    if (verdict_of(gm_on_m, tol) != Verdict::Holds) {
      rep.warped_case = WarpedCase::Outside;
      rep.case_note = "mu is not constant along E_mu";
    } else if (verdict_of(*rep.h_residual, tol) != Verdict::Holds) {
      rep.warped_case = WarpedCase::Outside;
      rep.case_note = "lambda differs from h(mu)";
    } else if (verdict_of(gl, tol) == Verdict::Holds && verdict_of(gm, tol) == Verdict::Holds) {
      rep.warped_case = WarpedCase::CaseI;
      rep.constant_lambda = rep.points.front().lambda;
      rep.constant_mu = rep.points.front().mu;
      double geod = 0.0;
      for (const auto& pt : rep.net.points) geod = std::max({geod, pt.blocks[0].geodesy, pt.blocks[0].geodesy_perp});
      if (verdict_of(geod, tol) == Verdict::Fails)
        rep.inconsistencies.push_back("constant eigenvalues but the eigenbundles are not totally geodesic");
    } else if (rep.rank_lambda == 1) {
      rep.warped_case = WarpedCase::CaseII;
      if (rep.net.flag("WP").verdict == Verdict::Fails)
        rep.inconsistencies.push_back("case (ii) but the eigenbundle net is not a WP-net");
      if (verdict_of(rep.tilmu_residual.value_or(0.0), tol) == Verdict::Fails)
        rep.inconsistencies.push_back("case (ii) but the warping relation fails");
    } else {
      rep.warped_case = WarpedCase::Outside;
      rep.case_note = "rank(E_lambda) >= 2 with non-constant eigenvalues";
    }
  }
  return rep;
}

CodazziReport classify_codazzi(const MetricField& g, const SymTensorField& phi, const std::optional<Expr>& h,
                               const SamplePlan& plan, double tol, double gap_min) {
  return classify_codazzi(g, phi, h, sample_points(g.chart(), plan), tol, gap_min);
}

// ---------------------------------------------------------------------------

namespace {

void require_block(const Expr& e, const IndexSet& block, const std::string& what) {
  for (int v : e.variables())
    if (std::find(block.begin(), block.end(), v) == block.end())
      throw std::invalid_argument(what + " may only depend on its own block");
}

double coarse_codazzi(const MetricField& g, const SymTensorField& phi) {
  double worst = 0.0;
  for (const auto& p : sample_points(g.chart(), SamplePlan{4, 0.1, 0, 0}))
    worst = std::max(worst, codazzi_residual(g, phi, p, 1e-8));
  return worst;
}

std::vector<Point> positivity_samples(const Chart& c) { return sample_points(c, SamplePlan{5, 0.0, 0, 0}); }

}  // namespace

CodazziCandidate build_canonical_pair(const Chart& chart, const Expr& phi0, const Expr& phi1,
                                   const std::vector<std::vector<Expr>>& factor0,
                                   const std::vector<std::vector<Expr>>& factor1) {
  if (chart.blocks().size() != 2) throw std::invalid_argument("canonical_pair: chart needs exactly two blocks");
  const IndexSet& B0 = chart.blocks()[0];
  const IndexSet& B1 = chart.blocks()[1];
  require_block(phi0, B0, "phi0");
  require_block(phi1, B1, "phi1");
  const Expr inv_phi = phi0 + phi1;
  for (const auto& p : positivity_samples(chart))
    if (!(inv_phi.eval(p) > 0.0)) throw std::domain_error("canonical_pair: phi0 + phi1 is not positive on the domain");
  const int n = chart.dim();
  std::vector<std::vector<Expr>> e(n, std::vector<Expr>(n, Expr::constant(0.0)));
  const Expr scale = 1.0 / pow(inv_phi, 2.0);
  auto place = [&](const IndexSet& B, const std::vector<std::vector<Expr>>& f, const char* name) {
    if (f.size() != B.size()) throw std::invalid_argument(std::string(name) + ": wrong size");
    for (std::size_t r = 0; r < B.size(); ++r) {
      if (f[r].size() != B.size()) throw std::invalid_argument(std::string(name) + ": wrong size");
      for (std::size_t c = 0; c < B.size(); ++c) {
        require_block(f[r][c], B, name);
        e[B[r]][B[c]] = scale * f[r][c];
      }
    }
  };
  place(B0, factor0, "factor 0 metric");
  place(B1, factor1, "factor 1 metric");
  std::vector<Expr> d(n);
  for (int a : B0) d[a] = phi1;
  for (int a : B1) d[a] = -phi0;
  MetricField g(chart, e);
  SymTensorField phi = SymTensorField::diagonal(chart, d);
  const double res = coarse_codazzi(g, phi);
  return {g, phi, res};
}

CodazziCandidate build_warped_pair(const Chart& chart, const Expr& h, const Expr& sigma, const Expr& mu,
                                    const std::vector<std::vector<Expr>>& factor1, double tol) {
  if (chart.blocks().size() != 2 || chart.blocks()[0].size() != 1)
    throw std::invalid_argument("warped_pair: chart needs blocks {t} and the fiber block");
  if (h.max_variable() > 0) throw std::invalid_argument("warped_pair: h must be a function of one variable");
  const int t = chart.blocks()[0][0];
  const IndexSet& B1 = chart.blocks()[1];
  require_block(sigma, {t}, "sigma");
  require_block(mu, {t}, "mu");
  for (const auto& p : positivity_samples(chart))
    if (!(sigma.eval(p) > 0.0)) throw std::domain_error("warped_pair: sigma is not positive on the domain");

  const Expr hmu = substitute(h, 0, mu);
  const Expr relation = diff(mu, t) - (hmu - mu) * diff(sigma, t) / sigma;
  double worst = 0.0;
  for (const auto& p : sample_points(chart, SamplePlan{9, 0.0, 0, 0})) worst = std::max(worst, std::abs(relation.eval(p)));
  if (worst > tol)
    throw CodazziError("warped_pair: (h, sigma, mu) violate the warping relation, residual " + format_number(worst));

  const int n = chart.dim();
  std::vector<std::vector<Expr>> e(n, std::vector<Expr>(n, Expr::constant(0.0)));
  e[t][t] = Expr::constant(1.0);
  if (factor1.size() != B1.size()) throw std::invalid_argument("factor metric: wrong size");
  const Expr s2 = pow(sigma, 2.0);
  for (std::size_t r = 0; r < B1.size(); ++r) {
    if (factor1[r].size() != B1.size()) throw std::invalid_argument("factor metric: wrong size");
    for (std::size_t c = 0; c < B1.size(); ++c) {
      require_block(factor1[r][c], B1, "factor metric");
      e[B1[r]][B1[c]] = s2 * factor1[r][c];
    }
  }
  std::vector<Expr> d(n, mu);
  d[t] = hmu;
  MetricField g(chart, e);
  SymTensorField phi = SymTensorField::diagonal(chart, d);
  const double res = coarse_codazzi(g, phi);
  return {g, phi, res};
}

}  // namespace netgeom
