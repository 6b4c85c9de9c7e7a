#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qin {

enum class TableKind {
    chain_dr_verbatim,
    chain_dr_normalized,
    tree_dr,
    custom,
    split_counterexample,
};

const char* to_string(TableKind kind);
TableKind table_kind_from_string(const std::string& name);

// Chain auxiliaries: P[j] is the probability of an answer within j
// consecutive nodes (P[0] = 0), R[i] the expected referral reward of the
// i-th agent given no answer in the first i agents. Both 1-based, R[h] = 0.
struct ChainAux {
    std::vector<double> P;  // size h+1
    std::vector<double> R;  // size h+1, index 0 unused
};

// Tree auxiliaries: x[i] = r(i,1) direct-referral rewards (x[h] = 0) and
// a[i] = r(i,0) answer-holder rewards. 1-based, index 0 unused.
struct TreeAux {
    std::vector<double> x;  // size h+1
    std::vector<double> a;  // size h+1
};

// An oblivious reward scheme for horizon h: r(i, s) is the reward of the
// i-th agent on an answer path whose holder sits at level i+s. Defined for
// 1 <= i, 0 <= s, i+s <= h; reads outside that domain return 0.
struct RewardTable {
    int h = 0;
    TableKind kind = TableKind::custom;
    std::vector<std::vector<double>> r;  // r[i][s], row 0 unused
    std::optional<ChainAux> chain;
    std::optional<TreeAux> tree;

    double at(int i, int s) const {
        if (i < 1 || s < 0 || i + s > h) return 0.0;
        return r[i][s];
    }
    bool is_chain_style() const { return kind != TableKind::tree_dr; }
};

// Rewards along a path of length L: r(1, L-1), r(2, L-2), ..., r(L, 0).
// Throws OutOfHorizon when L > h, InvalidHorizon when L < 1.
std::vector<double> allocate(const RewardTable& table, int path_len);

}  // namespace qin
