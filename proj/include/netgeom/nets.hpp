#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netgeom/calculus.hpp"
#include "netgeom/sampling.hpp"

namespace netgeom {

/// Frame field split into mutually orthogonal blocks E0, ..., Ek.
class OrthogonalNet {
 public:
  OrthogonalNet(const Chart& chart, std::vector<VectorField> frame, std::vector<IndexSet> blocks);
  /// Coordinate frame d_0..d_{n-1} grouped by the given coordinate blocks.
  static OrthogonalNet coordinate(const Chart& chart, std::vector<IndexSet> blocks);

  int dim() const { return static_cast<int>(frame_.size()); }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<VectorField>& frame() const { return frame_; }
  const std::vector<IndexSet>& blocks() const { return blocks_; }
  const IndexSet& block(int i) const { return blocks_.at(i); }
  IndexSet complement_of(int i) const { return complement(blocks_.at(i), dim()); }
  bool is_coordinate() const { return coordinate_; }

  /// Throws std::invalid_argument if at p the frame is not a basis, two
  /// blocks are not g-orthogonal within tol, or (coordinate nets) the
  /// metric has an off-block entry above tol.
  void validate(const MetricField& g, const Point& p, double tol) const;

 private:
  std::vector<VectorField> frame_;
  std::vector<IndexSet> blocks_;
  bool coordinate_ = false;
};

struct DistributionGeometry {
  int block = 0;
  Vector H;    // mean curvature normal of E_i
  Vector eta;  // mean curvature normal of the complement
  double umbilicity = 0, umbilicity_perp = 0;
  double sphericity = 0, sphericity_perp = 0;
  double geodesy = 0, geodesy_perp = 0;
  double integrability = 0, integrability_perp = 0;
};

/// Geometry of one distribution spanned by a subset of frame vectors.
struct SubsetGeometry {
  Vector H;
  Matrix dH;  // coordinate Jacobian of H
  double umbilicity = 0, sphericity = 0, geodesy = 0, integrability = 0;
};

/// Everything the classifier needs at one sample point.
struct PointGeometry {
  Point p;
  std::vector<DistributionGeometry> blocks;
  std::vector<double> hs;  // eq. symmetry residual per block, evaluated unconditionally
  double h0_sum = 0;       // |H_0 - sum_{i>=1} eta_i|
  bool ill_conditioned = false;
};

/// g-orthogonal projection of v onto the span of the frame vectors in `set`.
Vector project(const MetricField& g, const OrthogonalNet& net, const IndexSet& set, const Vector& v, const Point& p);

/// Geometry of the distribution spanned by the frame vectors in `set`.
SubsetGeometry subset_geometry(const MetricField& g, const OrthogonalNet& net, const IndexSet& set, const Point& p);

DistributionGeometry distribution_geometry(const MetricField& g, const OrthogonalNet& net, int i, const Point& p);

/// |<nabla_{X'} eta_i, X> - <nabla_X H_i, X'>| over normalized frame pairs
/// X in E_i, X' in the complement. Empty when E_i or its complement is not
/// umbilical within tol at p.
std::optional<double> cwp_residual(const MetricField& g, const OrthogonalNet& net, int i, const Point& p,
                                   double tol);

PointGeometry analyze_point(const MetricField& g, const OrthogonalNet& net, const Point& p);

struct FlagResult {
  Verdict verdict = Verdict::Holds;
  double max_residual = 0.0;
};

inline const std::vector<std::string>& net_flag_names() {
  static const std::vector<std::string> names = {"TP", "WP", "QW", "CQW", "CQW0", "CWP", "CP"};
  return names;
}

struct NetReport {
  double tolerance = 0.0;
  std::vector<PointGeometry> points;
  std::map<std::string, FlagResult> flags;
  double h0_sum_residual = 0.0;
  /// eq. symmetry residual at i = 0; recorded when CP holds.
  std::optional<double> hs0_residual;
  /// Non-empty when a flag combination contradicts a proven implication.
  std::vector<std::string> inconsistencies;
  bool ill_conditioned = false;

  const FlagResult& flag(const std::string& name) const { return flags.at(name); }
  bool holds(const std::string& name) const { return flag(name).verdict == Verdict::Holds; }
};

/// Reduces per-point geometry into flags.
NetReport reduce_net(std::vector<PointGeometry> points, double tol);

NetReport classify_net(const MetricField& g, const OrthogonalNet& net, const SamplePlan& plan, double tol);
NetReport classify_net(const MetricField& g, const OrthogonalNet& net, const std::vector<Point>& samples,
                       double tol);

}  // namespace netgeom
