#include "vdelta/projection.hpp"

#include "vdelta/errors.hpp"

namespace vdelta {

namespace {
constexpr double kBandSlack = 1e-12;
}

PmfGrid project(const PmfGrid& p, const BlockPartition& part, const ToleranceBand& band) {
  const MassVector w = block_masses(p, part);
  const WStarSolution sol = solve_w_star(w, band);

  Grid scaled(p.size_x(), p.size_y(), 0.0);
  for (std::size_t j = 0; j < part.block_count(); ++j) {
    if (!(w[j] > 0.0)) continue;
    const double scale = sol.w_star[j] / w[j];
    const Block& b = part[j];
    for (std::size_t x = b.x0; x < b.x1; ++x) {
      for (std::size_t y = b.y0; y < b.y1; ++y) scaled(x, y) = p(x, y) * scale;
    }
  }
  return normalize(std::move(scaled));
}

bool is_in_band(const Grid& p, const BlockPartition& part, const ToleranceBand& band) {
  const MassVector w = block_masses(p, part);
  if (w.size() != band.size()) throw DimensionError("is_in_band: band has wrong length");
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] < band.lower()[j] - kBandSlack || w[j] > band.upper()[j] + kBandSlack) return false;
  }
  return true;
}

}  // namespace vdelta
