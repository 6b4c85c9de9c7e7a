#include "qin/offspring.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "qin/errors.hpp"

namespace qin {

OffspringDistribution OffspringDistribution::make(std::vector<double> probs) {
    if (probs.empty()) {
        throw DegenerateInput("offspring distribution needs at least c_0");
    }
    double mass = 0.0;
    for (double p : probs) {
        if (p < 0.0 || !std::isfinite(p)) {
            throw DegenerateInput("offspring probabilities must be finite and >= 0");
        }
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-12) {
        throw DegenerateInput("offspring probabilities sum to " + std::to_string(mass) +
                              ", expected 1 within 1e-12");
    }
    OffspringDistribution dist;
    dist.d = static_cast<int>(probs.size()) - 1;
    dist.c = std::move(probs);
    return dist;
}

OffspringDistribution OffspringDistribution::chain() {
    return make({0.0, 1.0});
}

double OffspringDistribution::branching_factor() const {
    double b = 0.0;
    for (int i = 0; i <= d; ++i) b += i * c[i];
    return b;
}

double OffspringDistribution::psi(double x) const {
    double v = 0.0;
    for (int i = d; i >= 0; --i) v = v * x + c[i];
    return v;
}

double OffspringDistribution::psi_prime(double x) const {
    double v = 0.0;
    for (int i = d; i >= 1; --i) v = v * x + i * c[i];
    return v;
}

double OffspringDistribution::psi_second(double x) const {
    double v = 0.0;
    for (int i = d; i >= 2; --i) v = v * x + i * (i - 1) * c[i];
    return v;
}

bool OffspringDistribution::is_chain() const {
    return d >= 1 && c[1] == 1.0;
}

double extinction_probability(const OffspringDistribution& dist, double tol) {
    if (tol <= 0.0) throw DegenerateInput("extinction tolerance must be > 0");
    double b = dist.branching_factor();
    if (b <= 1.0 + 1e-12) {
        // b < 1, or b = 1 with c_0 > 0: extinction is certain. b = 1 with
        // c_0 = 0 forces c_1 = 1; then Psi(x) = x everywhere and the smallest
        // fixed point is 0.
        return (dist.c[0] > 0.0 || b < 1.0 - 1e-12) ? 1.0 : 0.0;
    }
    double x = 0.0;
    for (long iter = 0; iter < 1000000; ++iter) {
        double next = dist.psi(x);
        if (std::abs(next - x) < tol) return next;
        x = next;
    }
    throw NonConvergence("extinction fixed-point iteration did not converge", x);
}

}  // namespace qin
