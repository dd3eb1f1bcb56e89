#include "vdelta/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vdelta/errors.hpp"

namespace vdelta {

namespace {

constexpr double kFeasibilitySlack = 1e-12;

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double sum_clipped(const MassVector& w, const ToleranceBand& band, double tau) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    s += clip(w[j] / tau, band.lower()[j], band.upper()[j]);
  }
  return s;
}

// Re-solves sum = 1 on the free set of `tau`, where the residual is linear in 1/tau.
// Coordinates sitting exactly on a bound count as free. The free set is re-derived
// from each candidate a few times and the root with the smallest residual wins.
double polish_root(const MassVector& w, const ToleranceBand& band, double tau) {
  const auto& a = band.lower();
  const auto& b = band.upper();
  double best = tau;
  double best_residual = std::abs(sum_clipped(w, band, tau) - 1.0);
  double current = tau;
  for (int round = 0; round < 4; ++round) {
    double free_mass = 0.0;
    double clipped = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double v = w[j] / current;
      if (v >= a[j] && v <= b[j]) {
        free_mass += w[j];
      } else {
        clipped += clip(v, a[j], b[j]);
      }
    }
    const double remaining = 1.0 - clipped;
    if (!(free_mass > 0.0) || !(remaining > 0.0)) break;
    const double candidate = free_mass / remaining;
    if (candidate == current) break;
    const double r = std::abs(sum_clipped(w, band, candidate) - 1.0);
    if (r <= best_residual) {
      best = candidate;
      best_residual = r;
    }
    current = candidate;
  }
  return best;
}

}  // namespace

ToleranceBand::ToleranceBand(MassVector w_ref, double delta)
    : w_ref_(std::move(w_ref)), delta_(delta) {
  if (!std::isfinite(delta) || delta < 0.0) {
    throw std::invalid_argument("tolerance delta must be finite and nonnegative");
  }
  lower_.reserve(w_ref_.size());
  upper_.reserve(w_ref_.size());
  double sum_lower = 0.0;
  double sum_upper = 0.0;
  for (double r : w_ref_) {
    lower_.push_back(clip(r - delta, 0.0, 1.0));
    upper_.push_back(clip(r + delta, 0.0, 1.0));
    sum_lower += lower_.back();
    sum_upper += upper_.back();
  }
  if (sum_lower > 1.0 + kFeasibilitySlack || sum_upper < 1.0 - kFeasibilitySlack) {
    throw InfeasibleBand("band is infeasible: sum of lower bounds " + std::to_string(sum_lower) +
                         ", sum of upper bounds " + std::to_string(sum_upper));
  }
}

WStarSolution solve_w_star(const MassVector& w, const ToleranceBand& band,
                           const SolverOptions& options) {
  if (w.size() != band.size()) {
    throw DimensionError("mass vector has " + std::to_string(w.size()) + " entries, band has " +
                         std::to_string(band.size()));
  }
  const double tol = options.tolerance;
  auto residual = [&](double tau) { return sum_clipped(w, band, tau) - 1.0; };

  // residual(tau) is nonincreasing, so the root sits where it changes sign.
  double lo = 1e-6;
  double hi = 1e6;
  while (residual(lo) < -tol && lo > 1e-300) lo *= 0.1;
  while (residual(hi) > tol && hi < 1e300) hi *= 10.0;
  if (residual(lo) < -tol || residual(hi) > tol) {
    throw SolverFailure("could not bracket the scaling root");
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < options.max_iterations; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::abs(r) < tol) break;
    if (r > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double tau = polish_root(w, band, mid);

  std::vector<double> w_star(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w_star[j] = clip(w[j] / tau, band.lower()[j], band.upper()[j]);
  }
  return {tau, MassVector(std::move(w_star))};
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DimensionError("kl_divergence: sizes " + std::to_string(p.size()) + " and " +
                         std::to_string(q.size()));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] > 0.0) d += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return d;
}

double coarse_divergence(const MassVector& w, const MassVector& v) {
  return kl_divergence(w.values(), v.values());
}

std::vector<double> block_uniform_divergences(const Grid& p, const BlockPartition& part) {
  const MassVector w = block_masses(p, part);
  std::vector<double> out(part.block_count(), 0.0);
  for (std::size_t j = 0; j < part.block_count(); ++j) {
    if (!(w[j] > 0.0)) continue;
    const Block& b = part[j];
    const double log_uniform = -std::log(static_cast<double>(b.size()));
    double d = 0.0;
    for (std::size_t x = b.x0; x < b.x1; ++x) {
      for (std::size_t y = b.y0; y < b.y1; ++y) {
        const double c = p(x, y) / w[j];
        if (c > 0.0) d += c * (std::log(c) - log_uniform);
      }
    }
    out[j] = d;
  }
  return out;
}

double potential_v(const Grid& p, const BlockPartition& part) {
  const MassVector w = block_masses(p, part);
  const std::vector<double> d = block_uniform_divergences(p, part);
  double v = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) v += w[j] * d[j];
  return v;
}

double potential_v_delta(const Grid& p, const BlockPartition& part, const ToleranceBand& band) {
  const MassVector w = block_masses(p, part);
  return coarse_divergence(w, solve_w_star(w, band).w_star);
}

double e_block(const Grid& p, const BlockPartition& part, const MassVector& w_ref) {
  const MassVector w = block_masses(p, part);
  if (w.size() != w_ref.size()) throw DimensionError("e_block: reference has wrong length");
  double e = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) e += std::abs(w[j] - w_ref[j]);
  return e;
}

double e_pix(const Grid& p, const Grid& x_data) {
  if (!p.same_shape(x_data)) throw DimensionError("e_pix: grid shapes differ");
  const auto a = p.values();
  const auto b = x_data.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace vdelta
