#include "qin/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qin/branching.hpp"
#include "qin/errors.hpp"

namespace qin {

namespace {

std::vector<std::vector<double>> empty_rows(int h) {
    std::vector<std::vector<double>> rows(h + 1);
    for (int i = 1; i <= h; ++i) rows[i].assign(h - i + 1, 0.0);
    return rows;
}

}  // namespace

RewardTable dr_chain_scheme(double n, int h, bool normalized) {
    if (h < 1) throw InvalidHorizon("chain DR scheme needs h >= 1");
    if (!(n > 1.0)) throw DegenerateInput("answer rarity n must be > 1");
    double p = 1.0 / n;

    ChainAux aux;
    aux.P.assign(h + 1, 0.0);
    for (int j = 1; j <= h; ++j) {
        aux.P[j] = aux.P[j - 1] + p * std::pow(1.0 - p, j - 1);
    }
    aux.R.assign(h + 1, 0.0);  // R[h] = 0, empty sum

    RewardTable table;
    table.h = h;
    table.kind = normalized ? TableKind::chain_dr_normalized
                            : TableKind::chain_dr_verbatim;
    table.r = empty_rows(h);

    // r(i,1) and R_i bottom-up; R_i = p*r(i,1) + (1-p)*P_{h-i-1}.
    for (int i = h - 1; i >= 1; --i) {
        double referral = n * aux.R[i + 1] + aux.P[h - i - 1];
        if (normalized) referral = std::max(referral, 1.0);
        table.r[i][1] = referral;
        aux.R[i] = p * referral + (1.0 - p) * aux.P[h - i - 1];
    }
    // r(i,0) = sum_{t=i}^{h-1} r(t,1) + 1, and unit rewards for s > 1.
    table.r[h][0] = 1.0;
    for (int i = h - 1; i >= 1; --i) table.r[i][0] = table.r[i + 1][0] + table.r[i][1];
    for (int i = 1; i <= h; ++i) {
        for (int s = 2; i + s <= h; ++s) table.r[i][s] = 1.0;
    }
    table.chain = std::move(aux);
    return table;
}

RewardTable dr_tree_scheme(const std::vector<double>& lambda, int h) {
    if (h < 1) throw InvalidHorizon("tree DR scheme needs h >= 1");
    if (static_cast<int>(lambda.size()) < h + 1) {
        throw HorizonMismatch("lambda must cover levels 1..h");
    }
    for (int i = 1; i <= h; ++i) {
        if (lambda[i] <= 1e-300) {
            throw DegenerateInput("lambda is degenerate at level " + std::to_string(i));
        }
    }

    std::vector<double> suffix(h + 2, 0.0);  // suffix[i] = sum_{l=i}^{h} lambda_l
    for (int i = h; i >= 1; --i) suffix[i] = suffix[i + 1] + lambda[i];

    TreeAux aux;
    aux.x.assign(h + 1, 0.0);  // x[h] = 0
    aux.a.assign(h + 1, 0.0);
    for (int i = h - 1; i >= 1; --i) {
        double best = -1.0;
        for (int j = i + 1; j <= h; ++j) {
            double v = aux.x[j] + (j - i) * suffix[i + 1] / lambda[i + 1];
            if (v > best) best = v;  // ties keep the smallest attaining j
        }
        aux.x[i] = best;
    }
    aux.a[h] = 1.0;
    for (int i = h - 1; i >= 1; --i) aux.a[i] = aux.x[i] + aux.a[i + 1] + 1.0;

    RewardTable table;
    table.h = h;
    table.kind = TableKind::tree_dr;
    table.r = empty_rows(h);
    for (int i = 1; i <= h; ++i) {
        table.r[i][0] = aux.a[i];
        if (i + 1 <= h) table.r[i][1] = aux.x[i];
        for (int s = 2; i + s <= h; ++s) table.r[i][s] = 1.0;
    }
    table.tree = std::move(aux);
    return table;
}

RewardTable dr_tree_scheme_for(const OffspringDistribution& dist, double n, int h) {
    auto phi = no_answer_probabilities(dist, n, h);
    return dr_tree_scheme(first_answer_distribution(dist, n, phi), h);
}

RewardTable split_counterexample_scheme(int h, double base) {
    if (h < 2) throw InvalidHorizon("split counterexample needs h >= 2");
    if (base < 1.0) throw DegenerateInput("split counterexample needs base >= 1");
    RewardTable table;
    table.h = h;
    table.kind = TableKind::split_counterexample;
    table.r = empty_rows(h);
    for (int i = 1; i <= h; ++i) {
        double share = std::max(1.0, base / std::pow(2.0, i - 1));
        for (int s = 0; i + s <= h; ++s) table.r[i][s] = share;
    }
    return table;
}

RewardTable custom_scheme(int h, std::vector<std::vector<double>> rows) {
    if (h < 1) throw InvalidHorizon("custom scheme needs h >= 1");
    if (static_cast<int>(rows.size()) != h + 1) {
        throw HorizonMismatch("custom scheme rows must be indexed 1..h");
    }
    for (int i = 1; i <= h; ++i) {
        if (static_cast<int>(rows[i].size()) != h - i + 1) {
            throw HorizonMismatch("custom scheme row " + std::to_string(i) +
                                  " must have " + std::to_string(h - i + 1) + " entries");
        }
    }
    RewardTable table;
    table.h = h;
    table.kind = TableKind::custom;
    table.r = std::move(rows);
    return table;
}

}  // namespace qin
