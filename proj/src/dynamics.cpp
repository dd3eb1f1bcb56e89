#include "vdelta/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "vdelta/errors.hpp"
#include "vdelta/projection.hpp"

namespace vdelta {

std::vector<double> gaussian_kernel(double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw std::invalid_argument("gaussian sigma must be finite and nonnegative");
  }
  if (sigma == 0.0) return {1.0};
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  const double denom = 2.0 * sigma * sigma;
  double total = 0.0;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double v = std::exp(-static_cast<double>(k * k) / denom);
    taps[static_cast<std::size_t>(k + radius)] = v;
    total += v;
  }
  for (double& t : taps) t /= total;
  return taps;
}

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  return m < static_cast<std::ptrdiff_t>(n) ? static_cast<std::size_t>(m)
                                            : static_cast<std::size_t>(period - 1 - m);
}

namespace {

// Convolves n samples spaced `stride` apart in place; `scratch` holds the input copy.
void convolve_line(double* line, std::size_t n, std::size_t stride, std::span<const double> kernel,
                   std::vector<double>& scratch) {
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = line[i * stride];
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
      const std::size_t src = reflect_index(static_cast<std::ptrdiff_t>(i) + k, n);
      acc += kernel[static_cast<std::size_t>(k + radius)] * scratch[src];
    }
    line[i * stride] = acc;
  }
}

}  // namespace

void smooth_region(Grid& g, const Block& region, std::span<const double> kernel) {
  if (kernel.size() <= 1) return;
  std::vector<double> scratch;
  double* base = g.values().data();
  const std::size_t row = g.size_y();
  for (std::size_t y = region.y0; y < region.y1; ++y) {
    convolve_line(base + region.x0 * row + y, region.width_x(), row, kernel, scratch);
  }
  for (std::size_t x = region.x0; x < region.x1; ++x) {
    convolve_line(base + x * row + region.y0, region.width_y(), 1, kernel, scratch);
  }
}

PmfGrid forward_block_blur(const PmfGrid& p, const BlockPartition& part, double sigma_fwd) {
  if (!part.matches(p)) throw DimensionError("forward_block_blur: grid/partition mismatch");
  const std::vector<double> kernel = gaussian_kernel(sigma_fwd);
  Grid out = p.grid();
  for (const Block& b : part.blocks()) {
    double before = 0.0;
    for (std::size_t x = b.x0; x < b.x1; ++x) {
      for (std::size_t y = b.y0; y < b.y1; ++y) before += out(x, y);
    }
    smooth_region(out, b, kernel);
    double after = 0.0;
    for (std::size_t x = b.x0; x < b.x1; ++x) {
      for (std::size_t y = b.y0; y < b.y1; ++y) after += out(x, y);
    }
    if (!(after > 0.0)) continue;
    const double scale = before / after;
    for (std::size_t x = b.x0; x < b.x1; ++x) {
      for (std::size_t y = b.y0; y < b.y1; ++y) out(x, y) *= scale;
    }
  }
  return PmfGrid::from_normalized(std::move(out));
}

PmfGrid reverse_step(const PmfGrid& p, const PmfGrid& q_data, const ReverseParams& params) {
  if (!p.grid().same_shape(q_data.grid())) throw DimensionError("reverse_step: shapes differ");
  if (!(params.beta >= 0.0 && params.beta <= 1.0)) {
    throw std::invalid_argument("reverse_step: beta must lie in [0, 1]");
  }
  Grid mixed(p.size_x(), p.size_y());
  const auto pv = p.values();
  const auto qv = q_data.values();
  auto out = mixed.values();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    out[i] = std::exp((1.0 - params.beta) * std::log(pv[i]) + params.beta * std::log(qv[i]));
  }
  PmfGrid pulled = normalize(std::move(mixed));
  if (params.sigma_smooth <= 0.0) return pulled;

  Grid smoothed = pulled.grid();
  const Block whole{0, smoothed.size_x(), 0, smoothed.size_y()};
  smooth_region(smoothed, whole, gaussian_kernel(params.sigma_smooth));
  return normalize(std::move(smoothed));
}

std::vector<PmfGrid> run_forward(const PmfGrid& p0, const BlockPartition& part,
                                 const ForwardParams& params) {
  const std::vector<double> sigmas(params.steps, params.sigma_fwd);
  return run_forward(p0, part, sigmas);
}

std::vector<PmfGrid> run_forward(const PmfGrid& p0, const BlockPartition& part,
                                 std::span<const double> sigmas) {
  std::vector<PmfGrid> traj;
  traj.reserve(sigmas.size() + 1);
  traj.push_back(p0);
  for (double sigma : sigmas) {
    if (!(sigma > 0.0)) throw std::invalid_argument("forward sigma must be positive");
    traj.push_back(forward_block_blur(traj.back(), part, sigma));
  }
  return traj;
}

ReversePair run_reverse_pair(const PmfGrid& p_start, const PmfGrid& q_data,
                             const BlockPartition& part, const ToleranceBand& band,
                             const ReverseParams& params) {
  ReversePair out;
  out.baseline.reserve(params.steps + 1);
  out.projected.reserve(params.steps + 1);
  out.pre_projection_drift.reserve(params.steps);
  out.baseline.push_back(p_start);
  out.projected.push_back(p_start);
  for (std::size_t n = 1; n <= params.steps; ++n) {
    out.baseline.push_back(reverse_step(out.baseline.back(), q_data, params));
    PmfGrid pending = reverse_step(out.projected.back(), q_data, params);
    out.pre_projection_drift.push_back(e_block(pending, part, band.reference()));
    out.projected.push_back(project(pending, part, band));
  }
  return out;
}

}  // namespace vdelta
