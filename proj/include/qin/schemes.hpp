#pragma once

#include <vector>

#include "qin/offspring.hpp"
#include "qin/reward_table.hpp"

namespace qin {

// Direct-referral scheme on a chain of height h, built bottom-up from
// r(i,1) = n*R_{i+1} + P_{h-i-1}. The verbatim variant keeps the formula as
// printed, which leaves r(h-1,1) = 0; the normalized variant clamps every
// r(i,1) to at least 1 and recomputes R accordingly.
RewardTable dr_chain_scheme(double n, int h, bool normalized);

// Direct-referral scheme on trees. lambda is 1-based (lambda[0] unused) and
// must be positive through level h; levels at or below 1e-300 raise
// DegenerateInput naming the level. Ties in the defining max break toward
// the smallest level.
RewardTable dr_tree_scheme(const std::vector<double>& lambda, int h);

// Convenience: derive lambda from the branching process, then build.
RewardTable dr_tree_scheme_for(const OffspringDistribution& dist, double n, int h);

// Chain table with geometric per-level shares r(i, s) = max(1, base/2^{i-1}).
// Deliberately not sybil-proof: an answer holder profits by appending sybils
// and collecting the descendants' shares.
RewardTable split_counterexample_scheme(int h, double base);

// Arbitrary oblivious table from explicit entries; rows must cover exactly
// 1 <= i, 0 <= s, i+s <= h.
RewardTable custom_scheme(int h, std::vector<std::vector<double>> rows);

}  // namespace qin
