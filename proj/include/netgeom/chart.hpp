#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace netgeom {

/// Upper bound on chart dimension; derivative carriers are sized by it.
inline constexpr int kMaxDim = 8;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = Eigen::VectorXd;
using IndexSet = std::vector<int>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Coordinate chart with a rectangular domain. A product chart additionally
/// carries a partition of the coordinate indices into blocks M0 x ... x Mk.
class Chart {
 public:
  Chart() = default;
  Chart(std::vector<std::string> names, std::vector<Interval> domain);
  static Chart box(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::vector<IndexSet>& blocks() const { return blocks_; }
  bool is_product() const { return !blocks_.empty(); }

  /// Throws std::invalid_argument unless `blocks` partitions {0..dim-1}.
  Chart with_blocks(std::vector<IndexSet> blocks, bool allow_empty_block0 = false) const;

  bool contains(const Point& p) const;
  Point center() const;
  Vector lower() const;
  Vector upper() const;
  /// Index of the block containing coordinate `i`, or -1.
  int block_of(int i) const;

 private:
  std::vector<std::string> names_;
  std::vector<Interval> domain_;
  std::vector<IndexSet> blocks_;
};

/// Throws std::invalid_argument unless `blocks` partitions {0..dim-1}.
void validate_partition(const std::vector<IndexSet>& blocks, int dim, bool allow_empty_block0);

IndexSet complement(const IndexSet& set, int dim);

}  // namespace netgeom
