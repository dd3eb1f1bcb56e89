#pragma once

#include "vdelta/grid.hpp"
#include "vdelta/potentials.hpp"

namespace vdelta {

/// KL projection of p onto the set of distributions whose block masses lie in `band`.
///
/// Each block with positive mass is scaled by w*_j / w_j(p), which keeps its
/// conditional shape, and the result is renormalized. Blocks with zero mass
/// stay empty apart from the positivity floor.
PmfGrid project(const PmfGrid& p, const BlockPartition& part, const ToleranceBand& band);

/// True iff every block mass of p lies in [a_j - 1e-12, b_j + 1e-12].
bool is_in_band(const Grid& p, const BlockPartition& part, const ToleranceBand& band);

}  // namespace vdelta
