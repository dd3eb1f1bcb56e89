#include "vdelta/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vdelta/errors.hpp"

namespace vdelta {

Grid::Grid(std::size_t size_x, std::size_t size_y, double fill)
    : size_x_(size_x), size_y_(size_y), values_(size_x * size_y, fill) {}

Grid::Grid(std::size_t size_x, std::size_t size_y, std::vector<double> values)
    : size_x_(size_x), size_y_(size_y), values_(std::move(values)) {
  if (values_.size() != size_x * size_y) {
    throw DimensionError("grid of " + std::to_string(size_x) + "x" + std::to_string(size_y) +
                         " given " + std::to_string(values_.size()) + " values");
  }
}

double Grid::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double Grid::max() const {
  if (values_.empty()) return 0.0;
  return *std::max_element(values_.begin(), values_.end());
}

PmfGrid PmfGrid::from_normalized(Grid grid) {
  for (double v : grid.values()) {
    if (!(v >= 0.0)) throw InvalidDistribution("negative or NaN entry in distribution");
  }
  const double total = grid.total();
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidDistribution("distribution sums to " + std::to_string(total));
  }
  return PmfGrid(std::move(grid));
}

PmfGrid normalize(Grid values, double floor) {
  if (values.size() == 0) throw InvalidDistribution("empty grid");
  // A sum that is not positive before clamping means there is no mass to normalize.
  const double raw = values.total();
  if (!(raw > 0.0)) throw InvalidDistribution("grid has no positive mass");
  for (double& v : values.values()) v = std::max(v, floor);
  const double total = values.total();
  for (double& v : values.values()) v /= total;
  return PmfGrid(std::move(values));
}

std::size_t BlockPartition::block_of(std::size_t x, std::size_t y) const {
  const std::size_t hx = size_x_ / blocks_x_;
  const std::size_t hy = size_y_ / blocks_y_;
  return (x / hx) * blocks_y_ + y / hy;
}

BlockPartition make_partition(std::size_t size_x, std::size_t size_y, std::size_t blocks_x,
                              std::size_t blocks_y) {
  if (size_x == 0 || size_y == 0 || blocks_x == 0 || blocks_y == 0 || size_x % blocks_x != 0 ||
      size_y % blocks_y != 0) {
    throw InvalidPartition("cannot split " + std::to_string(size_x) + "x" +
                           std::to_string(size_y) + " grid into " + std::to_string(blocks_x) +
                           "x" + std::to_string(blocks_y) + " blocks");
  }
  BlockPartition part;
  part.size_x_ = size_x;
  part.size_y_ = size_y;
  part.blocks_x_ = blocks_x;
  part.blocks_y_ = blocks_y;
  const std::size_t hx = size_x / blocks_x;
  const std::size_t hy = size_y / blocks_y;
  part.blocks_.reserve(blocks_x * blocks_y);
  for (std::size_t bx = 0; bx < blocks_x; ++bx) {
    for (std::size_t by = 0; by < blocks_y; ++by) {
      part.blocks_.push_back({bx * hx, (bx + 1) * hx, by * hy, (by + 1) * hy});
    }
  }
  return part;
}

double MassVector::total() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }

namespace {

void require_match(const Grid& p, const BlockPartition& part) {
  if (!part.matches(p)) {
    throw DimensionError("grid " + std::to_string(p.size_x()) + "x" + std::to_string(p.size_y()) +
                         " does not match partition " + std::to_string(part.size_x()) + "x" +
                         std::to_string(part.size_y()));
  }
}

double block_sum(const Grid& p, const Block& b) {
  double s = 0.0;
  for (std::size_t x = b.x0; x < b.x1; ++x) {
    for (std::size_t y = b.y0; y < b.y1; ++y) s += p(x, y);
  }
  return s;
}

}  // namespace

MassVector block_masses(const Grid& p, const BlockPartition& part) {
  require_match(p, part);
  std::vector<double> w;
  w.reserve(part.block_count());
  for (const Block& b : part.blocks()) w.push_back(block_sum(p, b));
  return MassVector(std::move(w));
}

Grid block_conditional(const Grid& p, const BlockPartition& part, std::size_t j) {
  require_match(p, part);
  if (j >= part.block_count()) throw DimensionError("block index out of range");
  const Block& b = part[j];
  const double w = block_sum(p, b);
  if (!(w > 0.0)) throw ZeroMassBlock("block " + std::to_string(j) + " has zero mass");
  Grid out(b.width_x(), b.width_y());
  for (std::size_t x = b.x0; x < b.x1; ++x) {
    for (std::size_t y = b.y0; y < b.y1; ++y) out(x - b.x0, y - b.y0) = p(x, y) / w;
  }
  return out;
}

}  // namespace vdelta
