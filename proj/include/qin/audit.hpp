#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qin/branching.hpp"
#include "qin/deviation.hpp"
#include "qin/offspring.hpp"
#include "qin/reward_table.hpp"

namespace qin {

enum class AuditMode { analytic, montecarlo, both };

AuditMode audit_mode_from_string(const std::string& name);
const char* to_string(AuditMode mode);

struct Witness {
    int i = 0;
    int k = 0;
    bool holder = false;
    double honest = 0.0;
    double deviant = 0.0;
    double margin = 0.0;  // honest - deviant; negative favors the deviation
    bool deviant_is_upper_bound = false;
    std::string conditioning;
    bool mc_checked = false;
    double mc_margin = 0.0;
    double mc_sigma = 0.0;
    bool mc_overruled = false;  // bound-only violation not confirmed by simulation
};

struct AuditReport {
    bool sybil_proof = true;
    AuditMode mode = AuditMode::analytic;
    double tolerance = 1e-9;
    double cost = 0.0;
    double min_margin = std::numeric_limits<double>::infinity();
    Witness min_margin_cell;
    std::vector<Witness> witnesses;  // confirmed violations
    std::vector<Witness> grid;       // the full (i, k, holder) sweep
    std::vector<PropertyCheck> property_checks;
};

struct AuditOptions {
    AuditMode mode = AuditMode::analytic;
    double tolerance = 1e-9;
    double n = 0.0;  // required for every table kind
    std::optional<std::vector<double>> lambda;       // tree tables (1-based)
    int d = 0;                                       // tree tables
    std::optional<OffspringDistribution> dist;       // Monte Carlo re-checks
    long long trials = 200000;
    uint64_t seed = 12345;
};

// Exact expected cost sum_i lambda_i * (sum of the path rewards for length i).
// lambda is 1-based and must cover exactly levels 1..table.h.
double expected_cost(const RewardTable& table, const std::vector<double>& lambda);

// Sweeps every deviation (i, k, holder) with i + k <= h and compares honest
// against deviant payoffs. Ties within the tolerance pass (a Nash deviation
// must improve strictly). Tree non-holder deviants use the analytic upper
// bound; in montecarlo/both mode a bound violation must be confirmed by
// simulation before it counts, and near-zero margins get simulated as well.
AuditReport check_sybil_proofness(const RewardTable& table, const AuditOptions& options);

struct CostScalingRow {
    int h = 0;
    double cost = 0.0;
    double cost_per_h2 = 0.0;
    double cost_norm = 0.0;  // cost / (n * h^2 * P_h^2), P_h = 1 - phi_h
    bool chain_mode = false;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool inside_bracket = true;
};

// Builds the DR table appropriate to the distribution per h and reports the
// exact expected cost with scaling normalizations. Chain rows also carry the
// explicit cost bracket [(n h^2/32) P_{h/8} P_{h/2}, P_h (n h^2 P_h + h) + h P_h].
std::vector<CostScalingRow> cost_scaling_report(const OffspringDistribution& dist,
                                                double n, const std::vector<int>& h_list,
                                                bool chain_normalized = true);

// Tree tables: x decreasing, x_i <= gamma (h-i) past the peak, and
// lambda_{i+1} x_i <= (gamma+1)(h-i) up to the peak, using the profile's
// landmarks. Chain tables instead check the referral and holder reward
// upper bounds.
PropertyReport check_x_properties(const RewardTable& table, const BranchingProfile& profile);

struct OptimalityReport {
    bool equal = false;
    double max_deviation = 0.0;
};

// Verbatim chain DR against the regular-mechanism lower bounds, pointwise on
// r(i,1) and a(i). Deviations are measured relative to max(1, |value|).
OptimalityReport optimality_check(double n, int h, double tol = 1e-12);

}  // namespace qin
