#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vdelta {

/// Positivity floor applied before normalization so that logarithms stay finite.
inline constexpr double kPmfFloor = 1e-12;

/// Dense row-major array of doubles indexed (x, y), x being the slow axis.
/// The first axis has size_x() = L_x entries, the second size_y() = L_y.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t size_x, std::size_t size_y, double fill = 0.0);
  Grid(std::size_t size_x, std::size_t size_y, std::vector<double> values);

  std::size_t size_x() const { return size_x_; }
  std::size_t size_y() const { return size_y_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t x, std::size_t y) const { return values_[x * size_y_ + y]; }
  double& operator()(std::size_t x, std::size_t y) { return values_[x * size_y_ + y]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double total() const;
  double max() const;
  bool same_shape(const Grid& other) const {
    return size_x_ == other.size_x_ && size_y_ == other.size_y_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t size_x_ = 0;
  std::size_t size_y_ = 0;
  std::vector<double> values_;
};

/// A Grid whose entries are nonnegative and sum to one.
///
/// Only obtainable through normalize() or from_normalized(), so holders can
/// rely on the invariant without re-checking it.
class PmfGrid {
 public:
  /// Adopts a grid that is already a distribution. Throws InvalidDistribution
  /// if any entry is negative or the total deviates from 1 by more than 1e-9.
  static PmfGrid from_normalized(Grid grid);

  const Grid& grid() const { return grid_; }
  operator const Grid&() const { return grid_; }  // NOLINT(google-explicit-constructor)

  std::size_t size_x() const { return grid_.size_x(); }
  std::size_t size_y() const { return grid_.size_y(); }
  std::size_t size() const { return grid_.size(); }
  double operator()(std::size_t x, std::size_t y) const { return grid_(x, y); }
  std::span<const double> values() const { return grid_.values(); }

  friend bool operator==(const PmfGrid&, const PmfGrid&) = default;

 private:
  explicit PmfGrid(Grid grid) : grid_(std::move(grid)) {}
  friend PmfGrid normalize(Grid values, double floor);

  Grid grid_;
};

/// Clamps entries below at `floor`, then divides by the total.
PmfGrid normalize(Grid values, double floor = kPmfFloor);

/// Axis-aligned rectangle [x0, x1) x [y0, y1).
struct Block {
  std::size_t x0 = 0;
  std::size_t x1 = 0;
  std::size_t y0 = 0;
  std::size_t y1 = 0;

  std::size_t width_x() const { return x1 - x0; }
  std::size_t width_y() const { return y1 - y0; }
  std::size_t size() const { return width_x() * width_y(); }
  bool contains(std::size_t x, std::size_t y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
};

/// Tiling of an L_x by L_y grid into B_x * B_y equal rectangles. Block j has
/// coordinates (b_x, b_y) = (j / B_y, j % B_y).
class BlockPartition {
 public:
  std::size_t size_x() const { return size_x_; }
  std::size_t size_y() const { return size_y_; }
  std::size_t blocks_x() const { return blocks_x_; }
  std::size_t blocks_y() const { return blocks_y_; }
  std::size_t block_count() const { return blocks_.size(); }

  const Block& operator[](std::size_t j) const { return blocks_[j]; }
  const std::vector<Block>& blocks() const { return blocks_; }

  std::size_t block_of(std::size_t x, std::size_t y) const;
  bool matches(const Grid& grid) const {
    return grid.size_x() == size_x_ && grid.size_y() == size_y_;
  }

 private:
  friend BlockPartition make_partition(std::size_t, std::size_t, std::size_t, std::size_t);

  std::size_t size_x_ = 0;
  std::size_t size_y_ = 0;
  std::size_t blocks_x_ = 0;
  std::size_t blocks_y_ = 0;
  std::vector<Block> blocks_;
};

/// Throws InvalidPartition unless size_x % blocks_x == 0 and size_y % blocks_y == 0.
BlockPartition make_partition(std::size_t size_x, std::size_t size_y, std::size_t blocks_x,
                              std::size_t blocks_y);

/// Coarse-grained block-mass vector, indexed like the partition's blocks.
class MassVector {
 public:
  MassVector() = default;
  explicit MassVector(std::vector<double> w) : w_(std::move(w)) {}

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t j) const { return w_[j]; }
  double& operator[](std::size_t j) { return w_[j]; }
  auto begin() const { return w_.begin(); }
  auto end() const { return w_.end(); }
  std::span<const double> values() const { return w_; }
  double total() const;

  friend bool operator==(const MassVector&, const MassVector&) = default;

 private:
  std::vector<double> w_;
};

MassVector block_masses(const Grid& p, const BlockPartition& part);

/// Restriction of p to block j divided by its mass, shaped like the block.
/// Throws ZeroMassBlock if the block carries no mass.
Grid block_conditional(const Grid& p, const BlockPartition& part, std::size_t j);

}  // namespace vdelta
