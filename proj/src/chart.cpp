#include "netgeom/chart.hpp"

#include <algorithm>
#include <stdexcept>

namespace netgeom {

Chart::Chart(std::vector<std::string> names, std::vector<Interval> domain)
    : names_(std::move(names)), domain_(std::move(domain)) {
  if (names_.empty()) throw std::invalid_argument("chart: dimension must be positive");
  if (static_cast<int>(names_.size()) > kMaxDim)
    throw std::invalid_argument("chart: dimension exceeds " + std::to_string(kMaxDim));
  if (names_.size() != domain_.size()) throw std::invalid_argument("chart: names and domain sizes differ");
  for (std::size_t i = 0; i < domain_.size(); ++i)
    if (!(domain_[i].lo < domain_[i].hi))
      throw std::invalid_argument("chart: degenerate interval for coordinate " + names_[i]);
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j]) throw std::invalid_argument("chart: duplicate coordinate name " + names_[i]);
}

Chart Chart::box(int dim, double lo, double hi) {
  std::vector<std::string> names;
  for (int i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i));
  return Chart(std::move(names), std::vector<Interval>(dim, Interval{lo, hi}));
}

void validate_partition(const std::vector<IndexSet>& blocks, int dim, bool allow_empty_block0) {
  if (blocks.size() < 2) throw std::invalid_argument("partition: need at least two blocks");
  std::vector<int> seen(dim, 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty() && !(b == 0 && allow_empty_block0))
      throw std::invalid_argument("partition: block " + std::to_string(b) + " is empty");
    for (int i : blocks[b]) {
      if (i < 0 || i >= dim) throw std::invalid_argument("partition: index " + std::to_string(i) + " out of range");
      if (seen[i]++) throw std::invalid_argument("partition: index " + std::to_string(i) + " repeated");
    }
  }
  for (int i = 0; i < dim; ++i)
    if (!seen[i]) throw std::invalid_argument("partition: index " + std::to_string(i) + " not covered");
}

Chart Chart::with_blocks(std::vector<IndexSet> blocks, bool allow_empty_block0) const {
  validate_partition(blocks, dim(), allow_empty_block0);
  Chart c = *this;
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  c.blocks_ = std::move(blocks);
  return c;
}

bool Chart::contains(const Point& p) const {
  if (p.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (p[i] < domain_[i].lo || p[i] > domain_[i].hi) return false;
  return true;
}

Point Chart::center() const {
  Point p(dim());
  for (int i = 0; i < dim(); ++i) p[i] = 0.5 * (domain_[i].lo + domain_[i].hi);
  return p;
}

Vector Chart::lower() const {
  Vector v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = domain_[i].lo;
  return v;
}

Vector Chart::upper() const {
  Vector v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = domain_[i].hi;
  return v;
}

int Chart::block_of(int i) const {
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (std::find(blocks_[b].begin(), blocks_[b].end(), i) != blocks_[b].end()) return static_cast<int>(b);
  return -1;
}

IndexSet complement(const IndexSet& set, int dim) {
  IndexSet out;
  for (int i = 0; i < dim; ++i)
    if (std::find(set.begin(), set.end(), i) == set.end()) out.push_back(i);
  return out;
}

}  // namespace netgeom
