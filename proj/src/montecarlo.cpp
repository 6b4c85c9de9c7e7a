#include "qin/montecarlo.hpp"

#include <cmath>

#include "qin/errors.hpp"

namespace qin {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile

double ci_halfwidth(double sum, double sumsq, long long count) {
    if (count < 2) return 0.0;
    double mean = sum / count;
    double var = (sumsq - count * mean * mean) / (count - 1);
    if (var < 0.0) var = 0.0;
    return kZ99 * std::sqrt(var / count);
}

}  // namespace

TrialOutcome run_trial(const SampledTree& tree, const RewardTable& table,
                       SelectionRule rule, const std::optional<Deviation>& deviation,
                       SplitMix64& rng) {
    if (tree.depth < table.h) {
        throw HorizonMismatch("sampled tree shallower than the table horizon");
    }
    TrialOutcome outcome;

    int agent = -1;
    int block_low = -1, block_high = -1;  // monitored positions on the path
    SampledTree injected;
    const SampledTree* work = &tree;

    if (deviation) {
        agent = leftmost_active(tree, deviation->level);
        if (agent < 0) {
            outcome.monitored_active = false;
        } else {
            bool applicable = deviation->holder == tree.nodes[agent].answer;
            if (applicable && deviation->sybils > 0) {
                injected = inject_sybils(tree, *deviation, agent);
                work = &injected;
                outcome.deviation_applied = true;
                block_low = deviation->level;
                block_high = deviation->level + deviation->sybils;
            } else {
                block_low = block_high = deviation->level;
            }
        }
    }

    ReportMarks marks = resolve_reports(*work, table.h);
    auto path = select_answer(*work, marks, rule, rng);
    if (!path) return outcome;

    outcome.path = *path;
    int length = static_cast<int>(path->size());
    outcome.answer_level = length;
    outcome.rewards = allocate(table, length);
    for (double r : outcome.rewards) outcome.total_cost += r;

    if (agent >= 0) {
        // The agent sits at position block_low when it is on the path at all;
        // its sybils (if injected) occupy block_low+1..block_high.
        if (block_low <= length && (*path)[block_low - 1] == agent) {
            int last = std::min(block_high, length);
            for (int pos = block_low; pos <= last; ++pos) {
                outcome.monitored_utility += outcome.rewards[pos - 1];
            }
            outcome.rev_event = length > block_high;
            outcome.dr_event = length == block_high + 1;
        }
    }
    return outcome;
}

EstimateResult estimate(const OffspringDistribution& dist, double n, int h,
                        const RewardTable& table, SelectionRule rule,
                        const std::optional<Deviation>& deviation, long long trials,
                        uint64_t master_seed, long long block_size) {
    if (trials < 1) throw DegenerateInput("estimate needs trials >= 1");
    if (block_size < 1) throw DegenerateInput("estimate needs block_size >= 1");
    if (h != table.h) throw HorizonMismatch("estimate horizon must match the table");
    if (deviation) {
        if (deviation->level < 1 || deviation->level > h) {
            throw OutOfHorizon("deviation level outside 1..h");
        }
        if (deviation->level + deviation->sybils > h) {
            throw OutOfHorizon("deviation sybils extend beyond the horizon");
        }
    }

    EstimateResult result;
    result.trials = trials;
    result.h = h;
    result.master_seed = master_seed;
    result.has_deviation = deviation.has_value();
    result.level_freq.assign(h + 1, 0.0);

    double cost_sum = 0.0, cost_sumsq = 0.0;
    double util_sum = 0.0, util_sumsq = 0.0;
    std::vector<long long> level_counts(h + 1, 0);
    long long active = 0, dr = 0, rev = 0;

    long long done = 0;
    long long block_index = 0;
    while (done < trials) {
        long long batch = std::min(block_size, trials - done);
        double bc_sum = 0.0, bc_sumsq = 0.0, bu_sum = 0.0, bu_sumsq = 0.0;
        std::vector<long long> b_levels(h + 1, 0);

        for (long long t = done; t < done + batch; ++t) {
            SplitMix64 rng = SplitMix64::substream(master_seed, static_cast<uint64_t>(t));
            SampledTree tree = sample_tree(dist, n, h, rng);
            TrialOutcome outcome = run_trial(tree, table, rule, deviation, rng);

            bc_sum += outcome.total_cost;
            bc_sumsq += outcome.total_cost * outcome.total_cost;
            bu_sum += outcome.monitored_utility;
            bu_sumsq += outcome.monitored_utility * outcome.monitored_utility;
            if (outcome.answer_level >= 1) ++b_levels[outcome.answer_level];
            if (outcome.monitored_active) ++active;
            if (outcome.dr_event) ++dr;
            if (outcome.rev_event) ++rev;
        }

        BlockStats block;
        block.index = block_index++;
        block.trials = batch;
        block.mean_cost = bc_sum / batch;
        block.cost_ci = ci_halfwidth(bc_sum, bc_sumsq, batch);
        block.mean_utility = bu_sum / batch;
        block.utility_ci = ci_halfwidth(bu_sum, bu_sumsq, batch);
        block.level_freq.assign(h + 1, 0.0);
        for (int i = 1; i <= h; ++i) {
            block.level_freq[i] = static_cast<double>(b_levels[i]) / batch;
            level_counts[i] += b_levels[i];
        }
        result.blocks.push_back(std::move(block));

        cost_sum += bc_sum;
        cost_sumsq += bc_sumsq;
        util_sum += bu_sum;
        util_sumsq += bu_sumsq;
        done += batch;
    }

    result.mean_cost = cost_sum / trials;
    result.cost_ci = ci_halfwidth(cost_sum, cost_sumsq, trials);
    result.mean_utility = util_sum / trials;
    result.utility_ci = ci_halfwidth(util_sum, util_sumsq, trials);
    long long none = trials;
    for (int i = 1; i <= h; ++i) {
        result.level_freq[i] = static_cast<double>(level_counts[i]) / trials;
        none -= level_counts[i];
    }
    result.none_freq = static_cast<double>(none) / trials;
    result.monitored_active_freq = static_cast<double>(active) / trials;
    result.dr_freq = static_cast<double>(dr) / trials;
    result.rev_freq = static_cast<double>(rev) / trials;
    return result;
}

}  // namespace qin
