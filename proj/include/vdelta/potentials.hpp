#pragma once

#include <span>
#include <vector>

#include "vdelta/grid.hpp"

namespace vdelta {

/// Reference block masses with an admissible half-width delta.
///
/// The per-block interval is [a_j, b_j] = [clamp(w_ref_j - delta), clamp(w_ref_j + delta)]
/// with clamping to [0, 1]. Construction throws InfeasibleBand when
/// sum(a) > 1 or sum(b) < 1 (beyond a 1e-12 rounding allowance), and
/// std::invalid_argument for a negative or non-finite delta. delta = 0 is
/// accepted and pins every block to its reference mass.
class ToleranceBand {
 public:
  ToleranceBand(MassVector w_ref, double delta);

  const MassVector& reference() const { return w_ref_; }
  double delta() const { return delta_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  std::size_t size() const { return w_ref_.size(); }

 private:
  MassVector w_ref_;
  double delta_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct WStarSolution {
  double tau_star = 1.0;
  MassVector w_star;
};

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 80;
};

/// Optimal block masses of the KL projection onto the band.
///
/// Finds tau with sum_j clip(w_j / tau, a_j, b_j) = 1 by bisection on the
/// nonincreasing residual, starting from [1e-6, 1e6] and widening by decades
/// if an endpoint has the wrong sign. The bisection result is then polished
/// by solving the linear equation on its free set exactly, which leaves a
/// residual at rounding level. When every coordinate clips the root is a
/// plateau; w_star is unique but tau_star is whichever point bisection reached.
WStarSolution solve_w_star(const MassVector& w, const ToleranceBand& band,
                           const SolverOptions& options = {});

/// D_KL(p || q) in nats over entries where both are positive.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// sum_j w_j log(w_j / v_j) over j with w_j > 0 and v_j > 0.
double coarse_divergence(const MassVector& w, const MassVector& v);

/// Per-block D_KL(p_b || u_b) of each block conditional against the uniform
/// distribution on that block; zero-mass blocks report 0.
std::vector<double> block_uniform_divergences(const Grid& p, const BlockPartition& part);

/// V(p) = sum_b w_b D_KL(p_b || u_b).
double potential_v(const Grid& p, const BlockPartition& part);

/// Coarse V_delta(p) = sum_j w_j log(w_j / w*_j).
double potential_v_delta(const Grid& p, const BlockPartition& part, const ToleranceBand& band);

/// L1 distance between w(p) and w_ref.
double e_block(const Grid& p, const BlockPartition& part, const MassVector& w_ref);

/// Pixel mean squared error against x_data.
double e_pix(const Grid& p, const Grid& x_data);

}  // namespace vdelta
