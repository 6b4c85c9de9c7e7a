#include "qin/deviation.hpp"

#include <cmath>
#include <string>

#include "qin/errors.hpp"

namespace qin {

namespace {

void require_chain_table(const RewardTable& table) {
    if (!table.chain) {
        throw DegenerateInput("operation needs a chain table with auxiliaries");
    }
}

void require_tree_table(const RewardTable& table) {
    if (!table.tree) throw DegenerateInput("operation needs a tree DR table");
}

}  // namespace

ReferralPayoff chain_referral_payoff(const RewardTable& table, int i, int k) {
    require_chain_table(table);
    if (i < 1 || k < 0) throw DegenerateInput("chain deviation needs i >= 1, k >= 0");
    if (i + k > table.h) return {0.0, true};  // sybils beyond h earn nothing
    const ChainAux& aux = *table.chain;
    return {aux.R[i + k] + k * aux.P[table.h - i - k], false};
}

double chain_referral_payoff_exact(const RewardTable& table, double n, int i, int k) {
    if (i < 1 || k < 0) throw DegenerateInput("chain deviation needs i >= 1, k >= 0");
    int h = table.h;
    if (i + k > h) return 0.0;
    double p = 1.0 / n;
    // Answer at distance s below the block; block occupies levels i..i+k.
    double total = 0.0;
    for (int s = 1; s <= h - i - k; ++s) {
        double block = 0.0;
        for (int t = 0; t <= k; ++t) block += table.at(i + t, k - t + s);
        total += p * std::pow(1.0 - p, s - 1) * block;
    }
    return total;
}

double chain_holder_payoff(const RewardTable& table, int i, int k) {
    if (i < 1 || k < 0) throw DegenerateInput("chain deviation needs i >= 1, k >= 0");
    if (i + k > table.h) return 0.0;  // answer pushed beyond the horizon
    double total = table.at(i + k, 0);
    for (int s = 0; s <= k - 1; ++s) total += table.at(i + s, k - s);
    return total;
}

TreePathProbabilities tree_path_probabilities(const std::vector<double>& lambda,
                                              int d, double n, int i, int h) {
    if (i < 1 || i >= h) throw DegenerateInput("tree path probabilities need 1 <= i < h");
    if (static_cast<int>(lambda.size()) < h + 1) {
        throw HorizonMismatch("lambda must cover levels 1..h");
    }
    double denom = std::pow(static_cast<double>(d), i);
    double tail = 0.0;
    for (int j = i + 1; j <= h; ++j) tail += lambda[j];
    TreePathProbabilities probs;
    probs.p_rev = tail / denom;
    probs.p_dr = lambda[i + 1] / denom;
    double cond = n / (n - 1.0);
    probs.p_rev_na = cond * probs.p_rev;
    probs.p_dr_na = cond * probs.p_dr;
    return probs;
}

TreeReferralPayoff tree_referral_payoff(const RewardTable& table,
                                        const std::vector<double>& lambda, int d,
                                        double n, int i, int k) {
    require_tree_table(table);
    if (i >= table.h) throw OutOfHorizon("tree referral payoff needs i <= h-1");
    if (i < 1 || k < 0) throw DegenerateInput("tree deviation needs i >= 1, k >= 0");
    if (i + k > table.h) throw OutOfHorizon("tree deviation needs i + k <= h");
    const TreeAux& aux = *table.tree;
    double tail = 0.0;
    for (int j = i + 1; j <= table.h; ++j) tail += lambda[j];
    double denom = std::pow(static_cast<double>(d), i);
    double cond = n / (n - 1.0);
    if (k == 0) {
        return {cond * (lambda[i + 1] * aux.x[i] + tail) / denom, false};
    }
    return {cond * (lambda[i + 1] * aux.x[i + k] + (k + 1) * tail) / denom, true};
}

double tree_holder_payoff(const RewardTable& table, int i, int k) {
    require_tree_table(table);
    if (i < 1 || k < 1) throw DegenerateInput("tree holder deviation needs i >= 1, k >= 1");
    if (i + k > table.h) return 0.0;  // answer beyond the horizon is never selected
    const TreeAux& aux = *table.tree;
    return (k - 1) + aux.x[i + k - 1] + aux.a[i + k];
}

ChainLowerBounds chain_lower_bounds(double n, int h) {
    if (h < 1) throw InvalidHorizon("chain lower bounds need h >= 1");
    if (!(n > 1.0)) throw DegenerateInput("answer rarity n must be > 1");
    double p = 1.0 / n;

    ChainLowerBounds lb;
    lb.r_min.assign(h + 1, 0.0);
    lb.a_min.assign(h + 1, 0.0);

    // Induction from the bottom: the expected referral value of level i+1
    // under the minimal choices, summed literally over the answer position.
    for (int i = h - 1; i >= 1; --i) {
        double expected_below = 0.0;  // \hat R_{i+1}
        for (int s = 1; s <= h - i - 1; ++s) {
            double reward = (s == 1) ? lb.r_min[i + 1] : 1.0;
            expected_below += p * std::pow(1.0 - p, s - 1) * reward;
        }
        double unit_tail = 0.0;  // P_{h-i-1} summed literally
        for (int s = 1; s <= h - i - 1; ++s) unit_tail += p * std::pow(1.0 - p, s - 1);
        lb.r_min[i] = unit_tail + n * expected_below;
    }
    lb.a_min[h] = 1.0;
    for (int i = h - 1; i >= 1; --i) lb.a_min[i] = lb.r_min[i] + lb.a_min[i + 1];
    return lb;
}

}  // namespace qin
