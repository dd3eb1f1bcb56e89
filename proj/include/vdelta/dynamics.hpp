#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vdelta/grid.hpp"
#include "vdelta/potentials.hpp"

namespace vdelta {

struct ForwardParams {
  double sigma_fwd = 1.0;
  std::size_t steps = 0;
};

struct ReverseParams {
  double beta = 0.05;
  double sigma_smooth = 0.5;
  std::size_t steps = 40;
};

/// Normalized 1-D Gaussian taps for offsets -r..r with r = ceil(4 sigma).
/// sigma == 0 yields the identity tap {1}.
std::vector<double> gaussian_kernel(double sigma);

/// Maps an out-of-range index onto [0, n) by half-sample mirroring
/// (d c b a | a b c d | d c b a), repeating for offsets beyond one period.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n);

/// Separable Gaussian smoothing restricted to `region`, mirrored at the region's edges.
/// Entries outside the region are untouched.
void smooth_region(Grid& g, const Block& region, std::span<const double> kernel);

/// One step of the forward replication dynamics: every block is blurred on
/// its own and then rescaled so its mass matches the input exactly.
PmfGrid forward_block_blur(const PmfGrid& p, const BlockPartition& part, double sigma_fwd);

/// Geometric-mean pull toward q_data, p^(1-beta) q^beta, followed by
/// whole-grid smoothing. The smoothing crosses block boundaries.
PmfGrid reverse_step(const PmfGrid& p, const PmfGrid& q_data, const ReverseParams& params);

/// [p0, p1, ..., p_steps] under forward_block_blur with a fixed sigma.
std::vector<PmfGrid> run_forward(const PmfGrid& p0, const BlockPartition& part,
                                 const ForwardParams& params);

/// Time-inhomogeneous variant: step n uses sigmas[n].
std::vector<PmfGrid> run_forward(const PmfGrid& p0, const BlockPartition& part,
                                 std::span<const double> sigmas);

struct ReversePair {
  std::vector<PmfGrid> baseline;
  std::vector<PmfGrid> projected;
  /// ||w(reverse_step(p_{n-1}^proj)) - w_ref||_1 before projecting, for n = 1..T.
  std::vector<double> pre_projection_drift;
};

/// Runs the unprojected and projected reverse chains from the same start.
/// Both trajectories have params.steps + 1 states in execution order.
ReversePair run_reverse_pair(const PmfGrid& p_start, const PmfGrid& q_data,
                             const BlockPartition& part, const ToleranceBand& band,
                             const ReverseParams& params);

}  // namespace vdelta
