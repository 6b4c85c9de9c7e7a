#include "qin/branching.hpp"

#include <algorithm>
#include <cmath>

#include "qin/errors.hpp"

namespace qin {

namespace {

constexpr double kLambdaFloor = 1e-300;  // below this a division is degenerate

void require_rarity(double n) {
    if (!(n > 1.0)) throw DegenerateInput("answer rarity n must be > 1");
}

}  // namespace

double t_map(const OffspringDistribution& dist, double n, double x) {
    return dist.psi(x * (1.0 - 1.0 / n));
}

double t_prime(const OffspringDistribution& dist, double n, double x) {
    double q = 1.0 - 1.0 / n;
    return q * dist.psi_prime(x * q);
}

std::vector<double> no_answer_probabilities(const OffspringDistribution& dist,
                                            double n, int h) {
    require_rarity(n);
    if (h < 0) throw InvalidHorizon("depth h must be >= 0");
    std::vector<double> phi(h + 1);
    phi[0] = 1.0;
    for (int i = 1; i <= h; ++i) phi[i] = t_map(dist, n, phi[i - 1]);
    return phi;
}

std::vector<double> first_answer_distribution(const std::vector<double>& phi) {
    std::vector<double> lambda(phi.size(), 0.0);
    for (size_t i = 1; i < phi.size(); ++i) lambda[i] = phi[i - 1] - phi[i];
    return lambda;
}

double t_divided_difference(const OffspringDistribution& dist, double n, double a,
                            double b) {
    double q = 1.0 - 1.0 / n;
    double result = 0.0;
    double qj = q;  // q^j
    for (int j = 1; j <= dist.d; ++j, qj *= q) {
        if (dist.c[j] == 0.0) continue;
        // sum_{m=0}^{j-1} a^m b^{j-1-m}
        double inner = 0.0;
        double am = 1.0;
        for (int m = j - 1; m >= 0; --m) {
            inner = inner * b + am;
            am *= a;
        }
        result += dist.c[j] * qj * inner;
    }
    return result;
}

std::vector<double> first_answer_distribution(const OffspringDistribution& dist,
                                              double n, const std::vector<double>& phi) {
    std::vector<double> lambda(phi.size(), 0.0);
    if (phi.size() < 2) return lambda;
    lambda[1] = 1.0 - phi[1];
    for (size_t i = 2; i < phi.size(); ++i) {
        lambda[i] = lambda[i - 1] * t_divided_difference(dist, n, phi[i - 2], phi[i - 1]);
    }
    return lambda;
}

int lambda_peak_level(const std::vector<double>& lambda, int h) {
    int peak = 1;
    for (int i = 2; i <= h; ++i) {
        if (lambda[i] > lambda[peak]) peak = i;
    }
    return peak;
}

double lambda_tail_constant(const std::vector<double>& lambda, int h, int ellstar) {
    double gamma = 1.0;
    double tail = 0.0;
    std::vector<double> tails(h + 2, 0.0);
    for (int i = h; i >= 1; --i) {
        tail += lambda[i];
        tails[i] = tail;
    }
    for (int i = ellstar + 2; i <= h; ++i) {
        if (lambda[i] < kLambdaFloor) {
            throw DegenerateInput("lambda underflow at level " + std::to_string(i) +
                                  "; tail constant undefined");
        }
        gamma = std::max(gamma, tails[i] / lambda[i]);
    }
    return gamma;
}

Landmarks landmarks(const OffspringDistribution& dist, double n, int h) {
    require_rarity(n);
    if (h < 1) throw InvalidHorizon("landmarks need h >= 1");
    double b = dist.branching_factor();
    if (b <= 1.0) {
        throw UnsupportedRegime("landmarks need branching factor b > 1, got b = " +
                                std::to_string(b));
    }
    double q = (1.0 - 1.0 / n) * b;
    if (q <= 1.0) {
        throw UnsupportedRegime("landmarks need (1 - 1/n) * b > 1, got " +
                                std::to_string(q));
    }
    double zeta = extinction_probability(dist);
    Landmarks lm;
    lm.epsilon = 0.5 * std::min((1.0 - 1.0 / q) / (5.0 * dist.d), 1.0 - zeta);
    lm.rho = q * (1.0 - 5.0 * lm.epsilon * dist.d);
    if (lm.rho <= 1.0) {
        throw UnsupportedRegime(
            "landmarks need (1 - 1/n) * b * (1 - 5*epsilon*d) > 1, got " +
            std::to_string(lm.rho));
    }

    std::vector<double> phi = no_answer_probabilities(dist, n, h);
    std::vector<double> lambda = first_answer_distribution(dist, n, phi);

    int ell_eps = 0;
    while (ell_eps + 1 <= h && phi[ell_eps + 1] >= 1.0 - lm.epsilon) ++ell_eps;
    lm.ell1 = std::max(1, ell_eps - 1);

    lm.ellstar = lambda_peak_level(lambda, h);
    lm.gamma = lambda_tail_constant(lambda, h, lm.ellstar);
    return lm;
}

BranchingProfile make_profile(const OffspringDistribution& dist, double n, int h,
                              bool with_landmarks) {
    BranchingProfile profile;
    profile.n = n;
    profile.h_max = h;
    profile.phi = no_answer_probabilities(dist, n, h);
    profile.lambda = first_answer_distribution(dist, n, profile.phi);
    profile.zeta = extinction_probability(dist);
    if (with_landmarks) profile.landmarks = landmarks(dist, n, h);
    return profile;
}

PropertyReport verify_lambda_properties(const OffspringDistribution& dist,
                                        const BranchingProfile& profile) {
    double b = dist.branching_factor();
    if (b <= 1.0) {
        throw UnsupportedRegime("lambda property checks need branching factor b > 1");
    }
    const auto& phi = profile.phi;
    const auto& lambda = profile.lambda;
    int h = profile.h_max;

    // The peak and tail landmarks exist for every supercritical process; the
    // growth-regime ones (epsilon, rho, ell1) need (1-1/n) b well above 1.
    // Without them the growth check is vacuous.
    Landmarks lm;
    bool have_growth_regime = false;
    if (profile.landmarks) {
        lm = *profile.landmarks;
        have_growth_regime = true;
    } else {
        try {
            lm = landmarks(dist, profile.n, h);
            have_growth_regime = true;
        } catch (const UnsupportedRegime&) {
            lm.ellstar = lambda_peak_level(lambda, h);
            lm.gamma = lambda_tail_constant(lambda, h, lm.ellstar);
            lm.ell1 = 1;
        }
    }

    PropertyReport report;
    const double slack = 1e-12;

    // (a) lambda_{i+1}/lambda_i within [t'(phi_i), t'(phi_{i-1})]
    PropertyCheck ratio{"ratio_bracket", true, 0.0};
    for (int i = 1; i + 1 <= h; ++i) {
        if (lambda[i] < kLambdaFloor || lambda[i + 1] < kLambdaFloor) continue;
        double r = lambda[i + 1] / lambda[i];
        double lo = t_prime(dist, profile.n, phi[i]);
        double hi = t_prime(dist, profile.n, phi[i - 1]);
        double breach = std::max({lo - r, r - hi, 0.0}) / std::max(r, 1e-30);
        ratio.violation = std::max(ratio.violation, breach);
    }
    ratio.pass = ratio.violation <= slack;
    report.checks.push_back(ratio);

    // (b) single peak: no increase after the first strict decrease
    PropertyCheck peak{"single_peaked", true, 0.0};
    bool decreased = false;
    for (int i = 1; i + 1 <= h; ++i) {
        if (lambda[i + 1] < lambda[i]) decreased = true;
        if (decreased && lambda[i + 1] > lambda[i]) {
            double inc = (lambda[i + 1] - lambda[i]) / std::max(lambda[i], 1e-30);
            peak.violation = std::max(peak.violation, inc);
        }
    }
    peak.pass = peak.violation <= slack;
    report.checks.push_back(peak);

    // (c) geometric growth with factor rho strictly below ell1
    PropertyCheck growth{"growth_below_ell1", true, 0.0};
    for (int i = 1; have_growth_regime && i < lm.ell1 && i + 1 <= h; ++i) {
        double deficit = lm.rho * lambda[i] - lambda[i + 1];
        if (deficit > 0.0 && lambda[i] > kLambdaFloor) {
            growth.violation = std::max(growth.violation, deficit / lambda[i]);
        }
    }
    growth.pass = growth.violation <= slack;
    report.checks.push_back(growth);

    // (d) tail bound with the reported gamma
    PropertyCheck tail{"tail_gamma", true, 0.0};
    double tail_sum = 0.0;
    std::vector<double> tails(h + 2, 0.0);
    for (int i = h; i >= 1; --i) {
        tail_sum += lambda[i];
        tails[i] = tail_sum;
    }
    for (int i = lm.ellstar + 2; i <= h; ++i) {
        double breach = tails[i] - lm.gamma * lambda[i];
        if (breach > 0.0 && lambda[i] > kLambdaFloor) {
            tail.violation = std::max(tail.violation, breach / (lm.gamma * lambda[i]));
        }
    }
    tail.pass = tail.violation <= slack;
    report.checks.push_back(tail);

    // (e) (1 - phi_i)/lambda_{i+1} <= max{1/(b-1), 1/((phi_i - zeta)(1 - Psi'(zeta)))}
    PropertyCheck ratio_bound{"no_answer_over_lambda_bound", true, 0.0};
    double zeta = profile.zeta;
    double psi_prime_zeta = dist.psi_prime(zeta);
    for (int i = 0; i + 1 <= h; ++i) {
        if (phi[i] <= zeta || lambda[i + 1] < kLambdaFloor) continue;
        double lhs = (1.0 - phi[i]) / lambda[i + 1];
        double rhs = 1.0 / (b - 1.0);
        double gap = phi[i] - zeta;
        if (gap > kLambdaFloor && psi_prime_zeta < 1.0) {
            rhs = std::max(rhs, 1.0 / (gap * (1.0 - psi_prime_zeta)));
        }
        double breach = lhs - rhs;
        if (breach > 0.0) {
            ratio_bound.violation =
                std::max(ratio_bound.violation, breach / std::max(rhs, 1e-30));
        }
    }
    ratio_bound.pass = ratio_bound.violation <= slack;
    report.checks.push_back(ratio_bound);

    return report;
}

}  // namespace qin
