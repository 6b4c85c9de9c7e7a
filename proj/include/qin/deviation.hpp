#pragma once

#include <string>
#include <vector>

#include "qin/reward_table.hpp"

namespace qin {

enum class AnswerPlacement { agent, last_sybil };

// A chain-sybil deviation: the agent at `level` inserts `sybils` fake nodes
// between itself and its original children. A holder may relocate its answer
// to the last sybil (the deepest position of the block).
struct Deviation {
    int level = 1;
    int sybils = 0;
    bool holder = false;
    AnswerPlacement placement = AnswerPlacement::last_sybil;
};

struct ReferralPayoff {
    double value = 0.0;
    bool beyond_horizon = false;
};

// D(i,k) = R_{i+k} + k * P_{h-i-k}: expected reward of a non-holder at level
// i with k chain sybils, conditioned on no answer in levels 1..i. Read from
// the table's chain auxiliaries; i+k > h yields 0 tagged beyond_horizon.
ReferralPayoff chain_referral_payoff(const RewardTable& table, int i, int k);

// Same expectation evaluated by literal summation over the answer position,
// valid for any chain-style table (no DR structure assumed).
double chain_referral_payoff_exact(const RewardTable& table, double n, int i, int k);

// Reward collected by a first answer holder at level i that appends k sybils
// and places the answer at the last one: sum_{s=0}^{k-1} r(i+s, k-s) + r(i+k, 0).
// k = 0 gives r(i, 0).
double chain_holder_payoff(const RewardTable& table, int i, int k);

struct TreePathProbabilities {
    double p_rev = 0.0;     // v on the selected answer path, holder below v
    double p_dr = 0.0;      // the selected holder is a child of v
    double p_rev_na = 0.0;  // conditioned on v having no answer
    double p_dr_na = 0.0;
};

// lambda is 1-based. Valid for 1 <= i < h.
TreePathProbabilities tree_path_probabilities(const std::vector<double>& lambda,
                                              int d, double n, int i, int h);

struct TreeReferralPayoff {
    double value = 0.0;
    bool is_upper_bound = false;  // k >= 1 values bound the deviant payoff from above
};

// Expected reward of a non-holder at level i of the underlying d-ary tree,
// conditioned on it having no answer. k = 0 is the exact honest expectation;
// k >= 1 is the deviant upper bound used in the sybil-proofness argument.
TreeReferralPayoff tree_referral_payoff(const RewardTable& table,
                                        const std::vector<double>& lambda, int d,
                                        double n, int i, int k);

// Reward collected by a tree first answer holder at level i with k >= 1
// sybils, assuming the (im)possible best case that selection is unaffected:
// (k-1) + x_{i+k-1} + a_{i+k}.
double tree_holder_payoff(const RewardTable& table, int i, int k);

// Least rewards any regular sybil-proof chain mechanism can pay, obtained by
// the optimality induction with the minimal feasible choices (unit rewards
// for s > 1, unit answer reward at level h). 1-based; r_min covers 1..h-1,
// a_min covers 1..h.
struct ChainLowerBounds {
    std::vector<double> r_min;
    std::vector<double> a_min;
};

ChainLowerBounds chain_lower_bounds(double n, int h);

}  // namespace qin
