#include "qin/audit.hpp"

#include <algorithm>
#include <cmath>

#include "qin/errors.hpp"
#include "qin/montecarlo.hpp"
#include "qin/schemes.hpp"

namespace qin {

namespace {

// Chain first-answer distribution lambda_i = p (1-p)^{i-1}, 1-based.
std::vector<double> chain_lambda(double n, int h) {
    double p = 1.0 / n;
    std::vector<double> lambda(h + 1, 0.0);
    for (int i = 1; i <= h; ++i) lambda[i] = p * std::pow(1.0 - p, i - 1);
    return lambda;
}

struct McMargin {
    double margin = 0.0;
    double sigma = 0.0;
};

// Paired estimate of E[u_honest - u_deviant] with common random numbers:
// both arms replay the same per-trial streams, so trials where the deviation
// does not fire cancel exactly.
McMargin mc_margin(const RewardTable& table, const OffspringDistribution& dist,
                   double n, SelectionRule rule, const Deviation& deviation,
                   long long trials, uint64_t seed) {
    Deviation honest = deviation;
    honest.sybils = 0;
    double sum = 0.0, sumsq = 0.0;
    for (long long t = 0; t < trials; ++t) {
        SplitMix64 rng_tree = SplitMix64::substream(seed, static_cast<uint64_t>(t));
        SampledTree tree = sample_tree(dist, n, table.h, rng_tree);
        SplitMix64 rng_a = SplitMix64::substream(seed ^ 0x5bd1e995u, static_cast<uint64_t>(t));
        SplitMix64 rng_b = rng_a;
        TrialOutcome honest_out = run_trial(tree, table, rule, honest, rng_a);
        TrialOutcome dev_out = run_trial(tree, table, rule, deviation, rng_b);
        double diff = honest_out.monitored_utility - dev_out.monitored_utility;
        sum += diff;
        sumsq += diff * diff;
    }
    McMargin out;
    out.margin = sum / trials;
    double var = (sumsq - trials * out.margin * out.margin) / std::max<long long>(trials - 1, 1);
    out.sigma = std::sqrt(std::max(var, 0.0) / trials);
    return out;
}

void scan_cell(AuditReport& report, Witness cell) {
    cell.margin = cell.honest - cell.deviant;
    if (cell.margin < report.min_margin) {
        report.min_margin = cell.margin;
        report.min_margin_cell = cell;
    }
    report.grid.push_back(std::move(cell));
}

}  // namespace

AuditMode audit_mode_from_string(const std::string& name) {
    if (name == "analytic") return AuditMode::analytic;
    if (name == "montecarlo") return AuditMode::montecarlo;
    if (name == "both") return AuditMode::both;
    throw ConfigError("unknown audit mode: " + name);
}

const char* to_string(AuditMode mode) {
    switch (mode) {
        case AuditMode::analytic: return "analytic";
        case AuditMode::montecarlo: return "montecarlo";
        case AuditMode::both: return "both";
    }
    return "analytic";
}

double expected_cost(const RewardTable& table, const std::vector<double>& lambda) {
    if (static_cast<int>(lambda.size()) != table.h + 1) {
        throw HorizonMismatch("expected_cost needs lambda over exactly levels 1..h");
    }
    double total = 0.0;
    for (int len = 1; len <= table.h; ++len) {
        double path = 0.0;
        for (int i = 1; i <= len; ++i) path += table.at(i, len - i);
        total += lambda[len] * path;
    }
    return total;
}

AuditReport check_sybil_proofness(const RewardTable& table, const AuditOptions& options) {
    if (!(options.n > 1.0)) throw ConfigError("audit needs answer rarity n > 1");
    int h = table.h;
    AuditReport report;
    report.mode = options.mode;
    report.tolerance = options.tolerance;

    bool tree_table = table.kind == TableKind::tree_dr;
    std::vector<double> lambda;
    if (tree_table) {
        if (!options.lambda || static_cast<int>(options.lambda->size()) != h + 1) {
            throw ConfigError("tree table audit needs lambda over levels 1..h");
        }
        if (options.d < 1) throw ConfigError("tree table audit needs arity d >= 1");
        lambda = *options.lambda;
    } else {
        lambda = chain_lambda(options.n, h);
    }
    report.cost = expected_cost(table, lambda);

    bool dr_chain = table.kind == TableKind::chain_dr_verbatim ||
                    table.kind == TableKind::chain_dr_normalized;

    if (tree_table) {
        for (int i = 1; i + 1 <= h; ++i) {
            double honest = tree_referral_payoff(table, lambda, options.d, options.n, i, 0).value;
            for (int k = 1; i + k <= h; ++k) {
                Witness cell;
                cell.i = i;
                cell.k = k;
                cell.holder = false;
                cell.honest = honest;
                cell.deviant =
                    tree_referral_payoff(table, lambda, options.d, options.n, i, k).value;
                cell.deviant_is_upper_bound = true;
                cell.conditioning = "NA(v)";
                scan_cell(report, std::move(cell));
            }
        }
        for (int i = 1; i <= h; ++i) {
            for (int k = 1; i + k <= h; ++k) {
                Witness cell;
                cell.i = i;
                cell.k = k;
                cell.holder = true;
                cell.honest = table.at(i, 0);
                cell.deviant = tree_holder_payoff(table, i, k);
                cell.conditioning = "first answer holder";
                scan_cell(report, std::move(cell));
            }
        }
        // Structural certificates behind the holder argument.
        const TreeAux& aux = *table.tree;
        PropertyCheck identity{"a_identity", true, 0.0};
        for (int i = 1; i < h; ++i) {
            double lhs = aux.a[i];
            double rhs = aux.x[i] + aux.a[i + 1] + 1.0;
            identity.violation = std::max(
                identity.violation, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
        identity.pass = identity.violation <= 1e-12;
        report.property_checks.push_back(identity);

        PropertyCheck floor{"x_at_least_one", true, 0.0};
        for (int i = 1; i + 1 <= h; ++i) {
            floor.violation = std::max(floor.violation, 1.0 - aux.x[i]);
        }
        floor.pass = floor.violation <= 1e-12;
        report.property_checks.push_back(floor);
    } else {
        for (int i = 1; i + 1 <= h; ++i) {
            double honest = dr_chain
                                ? chain_referral_payoff(table, i, 0).value
                                : chain_referral_payoff_exact(table, options.n, i, 0);
            for (int k = 1; i + k <= h; ++k) {
                Witness cell;
                cell.i = i;
                cell.k = k;
                cell.holder = false;
                cell.honest = honest;
                cell.deviant = dr_chain
                                   ? chain_referral_payoff(table, i, k).value
                                   : chain_referral_payoff_exact(table, options.n, i, k);
                cell.conditioning = "no answer in levels 1..i";
                scan_cell(report, std::move(cell));
            }
        }
        for (int i = 1; i <= h; ++i) {
            for (int k = 1; i + k <= h; ++k) {
                Witness cell;
                cell.i = i;
                cell.k = k;
                cell.holder = true;
                cell.honest = table.at(i, 0);
                cell.deviant = chain_holder_payoff(table, i, k);
                cell.conditioning = "first answer holder";
                scan_cell(report, std::move(cell));
            }
        }
        if (dr_chain) {
            const ChainAux& aux = *table.chain;
            bool verbatim = table.kind == TableKind::chain_dr_verbatim;
            PropertyCheck rec{verbatim ? "R_recurrence_equality" : "R_recurrence_dominance",
                              true, 0.0};
            for (int i = 1; i + 1 <= h; ++i) {
                double lhs = aux.R[i];
                double rhs = aux.R[i + 1] + aux.P[h - i - 1];
                double breach = verbatim ? std::abs(lhs - rhs) : std::max(0.0, rhs - lhs);
                rec.violation =
                    std::max(rec.violation, breach / std::max(1.0, std::abs(rhs)));
            }
            rec.pass = rec.violation <= 1e-12;
            report.property_checks.push_back(rec);
        }
    }

    // Monte Carlo pass: confirm violations and probe near-ties.
    if (options.mode != AuditMode::analytic) {
        OffspringDistribution dist;
        if (tree_table) {
            if (!options.dist) {
                throw ConfigError("montecarlo audit of a tree table needs the distribution");
            }
            dist = *options.dist;
        } else {
            dist = options.dist ? *options.dist : OffspringDistribution::chain();
        }
        for (Witness& cell : report.grid) {
            bool violation = cell.margin < -options.tolerance;
            bool near_tie = std::abs(cell.margin) <= 10.0 * options.tolerance;
            if (!violation && !near_tie) continue;
            Deviation deviation;
            deviation.level = cell.i;
            deviation.sybils = cell.k;
            deviation.holder = cell.holder;
            McMargin mc = mc_margin(table, dist, options.n, SelectionRule::SP, deviation,
                                    options.trials, options.seed);
            cell.mc_checked = true;
            cell.mc_margin = mc.margin;
            cell.mc_sigma = mc.sigma;
            // The tree non-holder deviant is only an upper bound; a bound
            // breach that simulation does not confirm is not a violation.
            if (violation && cell.deviant_is_upper_bound &&
                mc.margin >= -3.0 * mc.sigma) {
                cell.mc_overruled = true;
            }
        }
    }

    for (const Witness& cell : report.grid) {
        if (cell.margin < -options.tolerance && !cell.mc_overruled) {
            report.witnesses.push_back(cell);
        }
    }
    if (report.grid.empty()) report.min_margin = 0.0;  // h = 1: nothing to deviate to
    report.sybil_proof = report.witnesses.empty();
    return report;
}

std::vector<CostScalingRow> cost_scaling_report(const OffspringDistribution& dist,
                                                double n, const std::vector<int>& h_list,
                                                bool chain_normalized) {
    if (h_list.empty()) throw ConfigError("cost scaling needs at least one h");
    for (size_t j = 1; j < h_list.size(); ++j) {
        if (h_list[j] <= h_list[j - 1]) {
            throw ConfigError("cost scaling needs an ascending h list");
        }
    }
    bool chain_mode = dist.is_chain();
    if (!chain_mode && dist.branching_factor() <= 1.0) {
        throw UnsupportedRegime("tree cost scaling needs branching factor b > 1");
    }

    std::vector<CostScalingRow> rows;
    for (int h : h_list) {
        if (h < 1) throw InvalidHorizon("cost scaling needs h >= 1");
        auto phi = no_answer_probabilities(dist, n, h);
        auto lambda = first_answer_distribution(dist, n, phi);
        RewardTable table = chain_mode ? dr_chain_scheme(n, h, chain_normalized)
                                       : dr_tree_scheme(lambda, h);
        CostScalingRow row;
        row.h = h;
        row.chain_mode = chain_mode;
        row.cost = expected_cost(table, lambda);
        row.cost_per_h2 = row.cost / (static_cast<double>(h) * h);
        double p_h = 1.0 - phi[h];
        row.cost_norm = row.cost / (n * h * h * p_h * p_h);
        if (chain_mode) {
            const ChainAux& aux = *table.chain;
            row.bracket_lo = (n * h * h / 32.0) * aux.P[h / 8] * aux.P[h / 2];
            row.bracket_hi = aux.P[h] * (n * h * h * aux.P[h] + h) + h * aux.P[h];
            row.inside_bracket = row.bracket_lo <= row.cost && row.cost <= row.bracket_hi;
        }
        rows.push_back(row);
    }
    return rows;
}

PropertyReport check_x_properties(const RewardTable& table, const BranchingProfile& profile) {
    PropertyReport report;
    const double slack = 1e-12;
    int h = table.h;

    if (table.kind == TableKind::tree_dr) {
        if (profile.h_max < h) throw HorizonMismatch("profile shallower than the table");
        if (static_cast<int>(profile.lambda.size()) < h + 1) {
            throw DegenerateInput("x property checks need the profile lambda sequence");
        }
        const TreeAux& aux = *table.tree;
        // gamma and the peak must refer to the table's horizon; recompute the
        // empirically minimal pair when the profile was built differently.
        Landmarks lm;
        if (profile.landmarks && profile.h_max == h) {
            lm = *profile.landmarks;
        } else {
            lm.ellstar = lambda_peak_level(profile.lambda, h);
            lm.gamma = lambda_tail_constant(profile.lambda, h, lm.ellstar);
        }

        PropertyCheck decreasing{"x_decreasing", true, 0.0};
        for (int i = 1; i + 1 <= h; ++i) {
            double rise = aux.x[i + 1] - aux.x[i];
            if (rise > 0.0) {
                decreasing.violation =
                    std::max(decreasing.violation, rise / std::max(1.0, aux.x[i]));
            }
        }
        decreasing.pass = decreasing.violation <= slack;
        report.checks.push_back(decreasing);

        PropertyCheck tail{"x_tail_bound", true, 0.0};
        for (int i = lm.ellstar + 1; i <= h; ++i) {
            double breach = aux.x[i] - lm.gamma * (h - i);
            if (breach > 0.0) {
                tail.violation =
                    std::max(tail.violation, breach / std::max(1.0, lm.gamma * (h - i)));
            }
        }
        tail.pass = tail.violation <= slack;
        report.checks.push_back(tail);

        PropertyCheck weighted{"lambda_x_bound", true, 0.0};
        for (int i = 1; i <= std::min(lm.ellstar, h - 1); ++i) {
            double lhs = profile.lambda[i + 1] * aux.x[i];
            double rhs = (lm.gamma + 1.0) * (h - i);
            if (lhs > rhs) {
                weighted.violation =
                    std::max(weighted.violation, (lhs - rhs) / std::max(1.0, rhs));
            }
        }
        weighted.pass = weighted.violation <= slack;
        report.checks.push_back(weighted);
        return report;
    }

    if (!table.chain) throw DegenerateInput("x property checks need table auxiliaries");
    const ChainAux& aux = *table.chain;
    double p = aux.P[1];
    double n = 1.0 / p;
    double p_h = aux.P[h];

    PropertyCheck referral{"referral_upper_bound", true, 0.0};
    double referral_cap = n * h * p_h + 1.0;
    for (int i = 1; i + 1 <= h; ++i) {
        double breach = table.at(i, 1) - referral_cap;
        if (breach > 0.0) {
            referral.violation = std::max(referral.violation, breach / referral_cap);
        }
    }
    referral.pass = referral.violation <= slack;
    report.checks.push_back(referral);

    PropertyCheck holder{"holder_upper_bound", true, 0.0};
    double holder_cap = n * h * h * p_h + h;
    for (int i = 1; i <= h; ++i) {
        double breach = table.at(i, 0) - holder_cap;
        if (breach > 0.0) {
            holder.violation = std::max(holder.violation, breach / holder_cap);
        }
    }
    holder.pass = holder.violation <= slack;
    report.checks.push_back(holder);
    return report;
}

OptimalityReport optimality_check(double n, int h, double tol) {
    RewardTable verbatim = dr_chain_scheme(n, h, /*normalized=*/false);
    ChainLowerBounds bounds = chain_lower_bounds(n, h);
    OptimalityReport report;
    for (int i = 1; i + 1 <= h; ++i) {
        double a = verbatim.at(i, 1);
        double b = bounds.r_min[i];
        report.max_deviation = std::max(
            report.max_deviation, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
    }
    for (int i = 1; i <= h; ++i) {
        double a = verbatim.at(i, 0);
        double b = bounds.a_min[i];
        report.max_deviation = std::max(
            report.max_deviation, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
    }
    report.equal = report.max_deviation <= tol;
    return report;
}

}  // namespace qin
