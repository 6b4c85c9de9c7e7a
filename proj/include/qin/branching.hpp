#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qin/offspring.hpp"

namespace qin {

// Levels and constants that structure the first-answer distribution lambda:
// geometric growth with factor rho strictly below ell1, a single peak at
// ellstar, and a geometric tail bounded by gamma from ellstar+2 on.
struct Landmarks {
    int ell1 = 1;
    int ellstar = 1;
    double rho = 1.0;
    double gamma = 1.0;  // smallest finite-horizon tail constant
    double epsilon = 0.0;
};

// Per-level no-answer and first-answer probabilities for a process with
// answer rarity n (p = 1/n). phi is indexed 0..h_max with phi[0] = 1;
// lambda is padded so lambda[i] = phi[i-1] - phi[i] (index 0 unused).
struct BranchingProfile {
    double n = 2.0;
    int h_max = 0;
    std::vector<double> phi;
    std::vector<double> lambda;
    double zeta = 0.0;
    std::optional<Landmarks> landmarks;
};

// One-level propagation map t(x) = Psi(x * (1 - 1/n)) and derivatives.
double t_map(const OffspringDistribution& dist, double n, double x);
double t_prime(const OffspringDistribution& dist, double n, double x);

// Exact divided difference (t(a) - t(b)) / (a - b) evaluated without the
// subtraction; equals t' between b and a.
double t_divided_difference(const OffspringDistribution& dist, double n, double a,
                            double b);

// phi[0..h] with phi[0] = 1 and phi[i] = t(phi[i-1]).
std::vector<double> no_answer_probabilities(const OffspringDistribution& dist,
                                            double n, int h);

// lambda[i] = phi[i-1] - phi[i] for i = 1..h; lambda[0] = 0.
std::vector<double> first_answer_distribution(const std::vector<double>& phi);

// Same values computed multiplicatively via the divided difference of t,
// which stays accurate deep in the tail where the plain subtraction cancels.
std::vector<double> first_answer_distribution(const OffspringDistribution& dist,
                                              double n, const std::vector<double>& phi);

// Peak level of lambda (smallest argmax over 1..h).
int lambda_peak_level(const std::vector<double>& lambda, int h);

// Smallest gamma with sum_{j>=i} lambda_j <= gamma * lambda_i on
// [ellstar+2, h]; 1 when that range is empty.
double lambda_tail_constant(const std::vector<double>& lambda, int h, int ellstar);

// Requires b > 1 and (1 - 1/n) * b * (1 - 5*epsilon*d) > 1; throws
// UnsupportedRegime naming the violated constraint otherwise.
Landmarks landmarks(const OffspringDistribution& dist, double n, int h);

BranchingProfile make_profile(const OffspringDistribution& dist, double n, int h,
                              bool with_landmarks);

struct PropertyCheck {
    std::string name;
    bool pass = true;
    double violation = 0.0;  // max violation magnitude observed
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Numerically verifies the structural claims about lambda on the computed
// range: ratio bracket via t', single-peakedness, geometric growth below
// ell1, the finite-horizon tail bound, and the (1-phi_i)/lambda_{i+1} bound.
// Failures are report entries, never exceptions.
PropertyReport verify_lambda_properties(const OffspringDistribution& dist,
                                        const BranchingProfile& profile);

}  // namespace qin
