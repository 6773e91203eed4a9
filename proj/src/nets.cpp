#include "netgeom/nets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "netgeom/detail/kernels.hpp"

namespace netgeom {

using detail::FieldAt;
using detail::Geometry;
using detail::Mat;
using detail::Vec;

OrthogonalNet::OrthogonalNet(const Chart& chart, std::vector<VectorField> frame, std::vector<IndexSet> blocks)
    : frame_(std::move(frame)), blocks_(std::move(blocks)) {
  const int n = chart.dim();
  if (static_cast<int>(frame_.size()) != n) throw std::invalid_argument("net: frame must have one field per dimension");
  for (const auto& f : frame_)
    if (f.dim() != n) throw std::invalid_argument("net: frame field has wrong dimension");
  validate_partition(blocks_, n, false);
  for (auto& b : blocks_) std::sort(b.begin(), b.end());
}

OrthogonalNet OrthogonalNet::coordinate(const Chart& chart, std::vector<IndexSet> blocks) {
  std::vector<VectorField> frame;
  for (int i = 0; i < chart.dim(); ++i) frame.push_back(VectorField::coordinate(i, chart.dim()));
  OrthogonalNet net(chart, std::move(frame), std::move(blocks));
  net.coordinate_ = true;
  return net;
}

void OrthogonalNet::validate(const MetricField& g, const Point& p, double tol) const {
  const MetricAt m = metric_at(g, p);
  const int n = dim();
  Matrix F(n, n);
  for (int a = 0; a < n; ++a) F.col(a) = frame_[a].at(p);
  const Matrix gram = F.transpose() * m.g * F;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 1e-12 * es.eigenvalues().maxCoeff()))
    throw std::invalid_argument("net: frame is degenerate at sample point");
  std::vector<int> owner(n);
  for (int b = 0; b < block_count(); ++b)
    for (int a : blocks_[b]) owner[a] = b;
  for (int a = 0; a < n; ++a)
    for (int c = a + 1; c < n; ++c) {
      if (owner[a] == owner[c]) continue;
      const double cosang = std::abs(gram(a, c)) / std::sqrt(gram(a, a) * gram(c, c));
      if (cosang > tol)
        throw std::invalid_argument("net: frame vectors " + std::to_string(a) + " and " + std::to_string(c) +
                                    " lie in different blocks but are not orthogonal (|cos| = " +
                                    format_number(cosang) + ")");
      if (coordinate_ && std::abs(m.g(a, c)) > tol)
        throw std::invalid_argument("net: metric is not block-diagonal, g(" + std::to_string(a) + "," +
                                    std::to_string(c) + ") = " + format_number(m.g(a, c)));
    }
}

namespace {

// Per-point data shared by every distribution of the net.
struct Context {
  int n = 0;
  Geometry<Dual> geo;
  Geometry<double> geod;
  std::vector<FieldAt<Dual>> frame;
  std::vector<FieldAt<double>> framed;
  std::vector<double> norms;
  bool ill_conditioned = false;
};

Geometry<double> values_of(const Geometry<Dual>& geo) {
  Geometry<double> out;
  out.n = geo.n;
  out.g = detail::values(geo.g);
  out.ginv = detail::values(geo.ginv);
  out.gamma.resize(geo.gamma.size());
  for (std::size_t i = 0; i < geo.gamma.size(); ++i) out.gamma[i] = geo.gamma[i].v;
  return out;
}

Context make_context(const MetricField& g, const OrthogonalNet& net, const Point& p) {
  if (net.dim() != g.dim()) throw std::invalid_argument("net and metric dimensions differ");
  Context ctx;
  ctx.ill_conditioned = metric_at(g, p).ill_conditioned;
  ctx.n = g.dim();
  ctx.geo = detail::geometry_dual(g, p);
  ctx.geod = values_of(ctx.geo);
  for (const auto& f : net.frame()) {
    FieldAt<Dual> fd = detail::field_dual(f, p);
    FieldAt<double> fv{detail::values(fd.val), detail::values(fd.D)};
    ctx.norms.push_back(detail::norm(ctx.geod.g, fv.val));
    ctx.frame.push_back(std::move(fd));
    ctx.framed.push_back(std::move(fv));
  }
  return ctx;
}

Mat<Dual> normal_projector(const Context& ctx, const IndexSet& set) {
  std::vector<Vec<Dual>> cols;
  for (int a : set) cols.push_back(ctx.frame[a].val);
  Mat<Dual> Q = detail::projector(ctx.geo.g, cols);
  for (std::size_t i = 0; i < Q.a.size(); ++i) Q.a[i] = -Q.a[i];
  for (int i = 0; i < ctx.n; ++i) Q(i, i) += 1.0;
  return Q;
}

SubsetGeometry subset_geometry(const Context& ctx, const IndexSet& set) {
  const int n = ctx.n;
  const int r = static_cast<int>(set.size());
  const IndexSet comp = complement(set, n);
  const Mat<Dual> Q = normal_projector(ctx, set);
  const Mat<double> Qd = detail::values(Q);

  Mat<Dual> gram(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) gram(a, b) = detail::inner(ctx.geo.g, ctx.frame[set[a]].val, ctx.frame[set[b]].val);
  const Mat<Dual> gram_inv = detail::inverse(gram);

  // second fundamental values s(a, b) = Q nabla_{f_a} f_b
  std::vector<Vec<Dual>> s(static_cast<std::size_t>(r) * r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      const auto& fa = ctx.frame[set[a]];
      const auto& fb = ctx.frame[set[b]];
      s[a * r + b] = detail::apply(Q, detail::cov_deriv(ctx.geo, fa.val, fb.val, fb.D));
    }

  Vec<Dual> H(n, Dual(0.0));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) H = detail::axpy(H, gram_inv(a, b), s[a * r + b]);
  for (auto& h : H) h = h / Dual(static_cast<double>(r));

  SubsetGeometry out;
  const Vec<double> Hv = detail::values(H);
  const Mat<double> dH = detail::jacobian(H, n);
  out.H = detail::to_eigen(Hv);
  out.dH = detail::to_eigen(dH);

  if (r > 1) {
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        Vec<double> d = detail::values(s[a * r + b]);
        d = detail::axpy(d, -gram(a, b).v, Hv);
        const double nrm = ctx.norms[set[a]] * ctx.norms[set[b]];
        out.umbilicity = std::max(out.umbilicity, detail::norm(ctx.geod.g, d) / nrm);
      }
  }

  for (int a : set) {
    const Vec<double> dXH = detail::cov_deriv(ctx.geod, ctx.framed[a].val, Hv, dH);
    for (int c : comp) {
      const double v = std::abs(detail::inner(ctx.geod.g, dXH, ctx.framed[c].val));
      out.sphericity = std::max(out.sphericity, v / (ctx.norms[a] * ctx.norms[c]));
    }
  }

  out.geodesy = out.umbilicity + detail::norm(ctx.geod.g, Hv);

  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b) {
      const Vec<double> br = detail::apply(Qd, detail::bracket(ctx.framed[set[a]], ctx.framed[set[b]]));
      const double nrm = ctx.norms[set[a]] * ctx.norms[set[b]];
      out.integrability = std::max(out.integrability, detail::norm(ctx.geod.g, br) / nrm);
    }
  return out;
}

double hs_residual(const Context& ctx, const IndexSet& set, const IndexSet& comp, const SubsetGeometry& E,
                   const SubsetGeometry& Eperp) {
  const Vec<double> Hv = detail::to_vec(E.H), etav = detail::to_vec(Eperp.H);
  const Mat<double> dH = detail::from_eigen(E.dH), deta = detail::from_eigen(Eperp.dH);
  double worst = 0.0;
  for (int a : set) {
    const Vec<double> dXH = detail::cov_deriv(ctx.geod, ctx.framed[a].val, Hv, dH);
    for (int c : comp) {
      const Vec<double> dZeta = detail::cov_deriv(ctx.geod, ctx.framed[c].val, etav, deta);
      const double lhs = detail::inner(ctx.geod.g, dZeta, ctx.framed[a].val);
      const double rhs = detail::inner(ctx.geod.g, dXH, ctx.framed[c].val);
      worst = std::max(worst, std::abs(lhs - rhs) / (ctx.norms[a] * ctx.norms[c]));
    }
  }
  return worst;
}

DistributionGeometry combine_pair(int i, const SubsetGeometry& E, const SubsetGeometry& P) {
  DistributionGeometry d;
  d.block = i;
  d.H = E.H;
  d.eta = P.H;
  d.umbilicity = E.umbilicity;
  d.umbilicity_perp = P.umbilicity;
  d.sphericity = E.sphericity;
  d.sphericity_perp = P.sphericity;
  d.geodesy = E.geodesy;
  d.geodesy_perp = P.geodesy;
  d.integrability = E.integrability;
  d.integrability_perp = P.integrability;
  return d;
}

}  // namespace

Vector project(const MetricField& g, const OrthogonalNet& net, const IndexSet& set, const Vector& v, const Point& p) {
  const MetricAt m = metric_at(g, p);
  std::vector<Vec<double>> cols;
  for (int a : set) cols.push_back(detail::to_vec(net.frame().at(a).at(p)));
  const Mat<double> P = detail::projector(detail::from_eigen(m.g), cols);
  return detail::to_eigen(detail::apply(P, detail::to_vec(v)));
}

SubsetGeometry subset_geometry(const MetricField& g, const OrthogonalNet& net, const IndexSet& set, const Point& p) {
  if (set.empty()) throw std::invalid_argument("subset_geometry: empty frame subset");
  return subset_geometry(make_context(g, net, p), set);
}

DistributionGeometry distribution_geometry(const MetricField& g, const OrthogonalNet& net, int i, const Point& p) {
  const Context ctx = make_context(g, net, p);
  return combine_pair(i, subset_geometry(ctx, net.block(i)), subset_geometry(ctx, net.complement_of(i)));
}

std::optional<double> cwp_residual(const MetricField& g, const OrthogonalNet& net, int i, const Point& p,
                                   double tol) {
  const Context ctx = make_context(g, net, p);
  const IndexSet set = net.block(i), comp = net.complement_of(i);
  const SubsetGeometry E = subset_geometry(ctx, set), P = subset_geometry(ctx, comp);
  if (E.umbilicity > tol || P.umbilicity > tol) return std::nullopt;
  return hs_residual(ctx, set, comp, E, P);
}

PointGeometry analyze_point(const MetricField& g, const OrthogonalNet& net, const Point& p) {
  const Context ctx = make_context(g, net, p);
  std::map<IndexSet, SubsetGeometry> cache;
  auto geom = [&](const IndexSet& s) -> const SubsetGeometry& {
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, subset_geometry(ctx, s)).first;
    return it->second;
  };

  PointGeometry out;
  out.p = p;
  out.ill_conditioned = ctx.ill_conditioned;
  for (int i = 0; i < net.block_count(); ++i) {
    const IndexSet set = net.block(i), comp = net.complement_of(i);
    const SubsetGeometry& E = geom(set);
    const SubsetGeometry& P = geom(comp);
    out.blocks.push_back(combine_pair(i, E, P));
    out.hs.push_back(hs_residual(ctx, set, comp, E, P));
  }
  Vector diff = out.blocks[0].H;
  for (int i = 1; i < net.block_count(); ++i) diff -= out.blocks[i].eta;
  out.h0_sum = detail::norm(ctx.geod.g, detail::to_vec(diff));
  return out;
}

namespace {

void absorb(FlagResult& f, double residual, double tol) {
  f.max_residual = std::max(f.max_residual, residual);
  f.verdict = combine(f.verdict, verdict_of(residual, tol));
}

void absorb_hs(FlagResult& f, const PointGeometry& pt, int i, double tol) {
  const auto& d = pt.blocks[i];
  if (d.umbilicity <= tol && d.umbilicity_perp <= tol) absorb(f, pt.hs[i], tol);
  else f.verdict = combine(f.verdict, Verdict::Inconclusive);  // overridden by any failure
}

}  // namespace

NetReport reduce_net(std::vector<PointGeometry> points, double tol) {
  if (points.empty()) throw std::invalid_argument("classify_net: no sample points");
  NetReport rep;
  rep.tolerance = tol;
  for (const auto& name : net_flag_names()) rep.flags[name] = FlagResult{};
  auto& TP = rep.flags["TP"];
  auto& WP = rep.flags["WP"];
  auto& QW = rep.flags["QW"];
  auto& CQW = rep.flags["CQW"];
  auto& CQW0 = rep.flags["CQW0"];
  auto& CWP = rep.flags["CWP"];
  auto& CP = rep.flags["CP"];

  for (const auto& pt : points) {
    rep.ill_conditioned = rep.ill_conditioned || pt.ill_conditioned;
    rep.h0_sum_residual = std::max(rep.h0_sum_residual, pt.h0_sum);
    const int k = static_cast<int>(pt.blocks.size()) - 1;
    for (int i = 0; i <= k; ++i) {
      const auto& d = pt.blocks[i];
      absorb(TP, d.umbilicity, tol);
      absorb(TP, d.integrability_perp, tol);
      if (i == 0) {
        absorb(CQW0, d.umbilicity_perp, tol);
        absorb(CP, d.umbilicity_perp, tol);
        continue;
      }
      absorb(WP, d.umbilicity, tol);
      absorb(WP, d.sphericity, tol);
      absorb(WP, d.geodesy_perp, tol);
      absorb(QW, d.umbilicity, tol);
      absorb(QW, d.geodesy_perp, tol);
      for (FlagResult* f : {&CQW, &CQW0, &CWP, &CP}) {
        absorb(*f, d.umbilicity, tol);
        absorb(*f, d.umbilicity_perp, tol);
      }
      absorb_hs(CWP, pt, i, tol);
      absorb_hs(CP, pt, i, tol);
    }
  }

  if (rep.holds("CP")) {
    FlagResult hs0;
    for (const auto& pt : points) absorb_hs(hs0, pt, 0, tol);
    rep.hs0_residual = hs0.max_residual;
    if (hs0.verdict == Verdict::Fails)
      rep.inconsistencies.push_back("CP holds but the symmetry condition fails for i = 0 (residual " +
                                    format_number(hs0.max_residual) + ")");
  }
  auto implies = [&](const char* a, const char* b) {
    if (rep.holds(a) && rep.flag(b).verdict == Verdict::Fails)
      rep.inconsistencies.push_back(std::string(a) + " holds but " + b + " fails");
  };
  implies("WP", "TP");
  implies("QW", "TP");
  implies("CP", "CWP");
  rep.points = std::move(points);
  return rep;
}

NetReport classify_net(const MetricField& g, const OrthogonalNet& net, const std::vector<Point>& samples,
                       double tol) {
  std::vector<PointGeometry> pts;
  pts.reserve(samples.size());
  for (const auto& p : samples) {
    net.validate(g, p, std::max(tol, 1e-12));
    pts.push_back(analyze_point(g, net, p));
  }
  return reduce_net(std::move(pts), tol);
}

NetReport classify_net(const MetricField& g, const OrthogonalNet& net, const SamplePlan& plan, double tol) {
  return classify_net(g, net, sample_points(g.chart(), plan), tol);
}

}  // namespace netgeom
