#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qin/deviation.hpp"
#include "qin/offspring.hpp"
#include "qin/reward_table.hpp"
#include "qin/rng.hpp"
#include "qin/sampled_tree.hpp"
#include "qin/selection.hpp"

namespace qin {

struct TrialOutcome {
    int answer_level = 0;  // 0 when no answer was reachable within h
    std::vector<int> path;
    std::vector<double> rewards;
    double total_cost = 0.0;
    double monitored_utility = 0.0;
    bool monitored_active = true;  // false: designated position not in the tree
    bool deviation_applied = false;
    bool dr_event = false;   // selected holder directly below the monitored block
    bool rev_event = false;  // monitored agent on the path, holder strictly below
};

// Runs the equilibrium strategy profile on one sampled tree, with the single
// deviating agent (if any) replaced by its sybil chain. A holder deviation
// fires only in trials where the designated agent holds an answer, a
// non-holder one only when it does not; otherwise the agent plays honestly.
// The designated agent occupies the leftmost underlying position at its level.
TrialOutcome run_trial(const SampledTree& tree, const RewardTable& table,
                       SelectionRule rule, const std::optional<Deviation>& deviation,
                       SplitMix64& rng);

struct BlockStats {
    long long index = 0;
    long long trials = 0;
    double mean_cost = 0.0;
    double cost_ci = 0.0;  // 99% half-width
    std::vector<double> level_freq;  // 1-based
    double mean_utility = 0.0;
    double utility_ci = 0.0;
};

struct EstimateResult {
    long long trials = 0;
    int h = 0;
    uint64_t master_seed = 0;
    bool has_deviation = false;
    double mean_cost = 0.0;
    double cost_ci = 0.0;
    std::vector<double> level_freq;  // 1-based; level_freq[i] estimates lambda_i
    double none_freq = 0.0;
    double mean_utility = 0.0;
    double utility_ci = 0.0;
    double monitored_active_freq = 0.0;
    double dr_freq = 0.0;
    double rev_freq = 0.0;
    std::vector<BlockStats> blocks;
};

// Trial t draws its own stream from (master_seed, t), so results are
// reproducible bit-for-bit and independent of scheduling. Confidence
// intervals are 99% normal approximations.
EstimateResult estimate(const OffspringDistribution& dist, double n, int h,
                        const RewardTable& table, SelectionRule rule,
                        const std::optional<Deviation>& deviation, long long trials,
                        uint64_t master_seed, long long block_size = 65536);

}  // namespace qin
