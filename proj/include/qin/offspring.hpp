#pragma once

#include <vector>

namespace qin {

// Offspring law of the Galton-Watson process: c[i] is the probability of a
// node having exactly i children, 0 <= i <= d.
struct OffspringDistribution {
    int d = 1;
    std::vector<double> c;  // size d+1, sums to 1

    // Validates and returns the distribution; throws DegenerateInput if some
    // c_i < 0 or the mass is off by more than 1e-12.
    static OffspringDistribution make(std::vector<double> probs);

    // Deterministic chain: every node has exactly one child.
    static OffspringDistribution chain();

    double branching_factor() const;  // b = sum_i i*c_i

    // Generating function Psi(x) = sum_i c_i x^i and derivatives.
    double psi(double x) const;
    double psi_prime(double x) const;
    double psi_second(double x) const;

    bool is_chain() const;
};

// Smallest fixed point of Psi on [0, 1]. For b <= 1 the known dichotomy is
// applied directly (1 unless the process is the deterministic chain, where
// every point is fixed and the smallest is 0); for b > 1 the value is found
// by iterating Psi from 0 until successive iterates differ by less than tol.
// Throws NonConvergence (carrying the last iterate) after 10^6 iterations.
double extinction_probability(const OffspringDistribution& dist, double tol = 1e-13);

}  // namespace qin
