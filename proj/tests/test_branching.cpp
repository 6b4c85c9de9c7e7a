#include <doctest.h>

#include <cmath>

#include "qin/branching.hpp"
#include "qin/errors.hpp"
#include "test_util.hpp"

using namespace qin;
using qin::test::close;

namespace {

const OffspringDistribution kFixture = OffspringDistribution::make({0.25, 0.0, 0.75});

}  // namespace

TEST_CASE("branching factor") {
    CHECK(OffspringDistribution::chain().branching_factor() == 1.0);
    CHECK(kFixture.branching_factor() == 1.5);
    CHECK(OffspringDistribution::make({0.5, 0.0, 0.5}).branching_factor() == 1.0);
}

TEST_CASE("offspring distribution validation") {
    CHECK_THROWS_AS(OffspringDistribution::make({0.5, 0.4}), DegenerateInput);
    CHECK_THROWS_AS(OffspringDistribution::make({-0.1, 1.1}), DegenerateInput);
    CHECK_THROWS_AS(OffspringDistribution::make({}), DegenerateInput);
}

TEST_CASE("extinction probability") {
    // b = 1 with c_0 > 0 forces certain extinction.
    CHECK(extinction_probability(OffspringDistribution::make({0.5, 0.0, 0.5})) == 1.0);
    // Deterministic chain: Psi(x) = x everywhere, smallest fixed point 0.
    CHECK(extinction_probability(OffspringDistribution::chain()) == 0.0);
    // Smaller root of 0.75 x^2 - x + 0.25 = 0.
    double zeta = extinction_probability(kFixture);
    CHECK(close(zeta, 1.0 / 3.0, 1e-10));
    CHECK(std::abs(kFixture.psi(zeta) - zeta) <= 10 * 1e-13);
    CHECK(extinction_probability(OffspringDistribution::make({0.9, 0.0, 0.1})) == 1.0);
}

TEST_CASE("no-answer probabilities") {
    auto chain = OffspringDistribution::chain();
    auto phi = no_answer_probabilities(chain, 2.0, 3);
    REQUIRE(phi.size() == 4);
    CHECK(phi[0] == 1.0);
    CHECK(phi[1] == 0.5);
    CHECK(phi[2] == 0.25);
    CHECK(phi[3] == 0.125);

    auto phi_fixture = no_answer_probabilities(kFixture, 2.0, 2);
    CHECK(phi_fixture[0] == 1.0);
    CHECK(close(phi_fixture[1], 0.4375));
    CHECK(close(phi_fixture[2], 0.285888671875));

    CHECK_THROWS_AS(no_answer_probabilities(chain, 1.0, 3), DegenerateInput);
}

TEST_CASE("first-answer distribution") {
    auto phi = no_answer_probabilities(OffspringDistribution::chain(), 2.0, 3);
    auto lambda = first_answer_distribution(phi);
    CHECK(lambda[1] == 0.5);
    CHECK(lambda[2] == 0.25);
    CHECK(lambda[3] == 0.125);
    CHECK(lambda[1] == 1.0 - phi[1]);

    auto lam_fixture = first_answer_distribution(no_answer_probabilities(kFixture, 2.0, 2));
    CHECK(close(lam_fixture[1], 0.5625));
    CHECK(close(lam_fixture[2], 0.151611328125));
}

TEST_CASE("chain closed forms at depth") {
    for (double n : {2.0, 10.0, 100.0}) {
        auto phi = no_answer_probabilities(OffspringDistribution::chain(), n, 200);
        auto lambda = first_answer_distribution(phi);
        double p = 1.0 / n;
        for (int i = 0; i <= 200; ++i) {
            CHECK(close(phi[i], std::pow(1.0 - p, i), 1e-12));
            if (i >= 1) CHECK(close(lambda[i], p * std::pow(1.0 - p, i - 1), 1e-12));
        }
    }
}

TEST_CASE("telescoping identity on random distributions") {
    SplitMix64 rng(2024);
    for (int rep = 0; rep < 50; ++rep) {
        auto dist = qin::test::random_distribution(rng, false);
        double n = 1.5 + 30.0 * rng.next_double();
        int h = 1 + static_cast<int>(rng.next_below(40));
        auto phi = no_answer_probabilities(dist, n, h);
        auto lambda = first_answer_distribution(phi);
        double sum = 0.0;
        for (int i = 1; i <= h; ++i) {
            CHECK(lambda[i] >= 0.0);
            sum += lambda[i];
        }
        CHECK(close(sum + phi[h], 1.0, 1e-12));
        // phi non-increasing
        for (int i = 1; i <= h; ++i) CHECK(phi[i] <= phi[i - 1]);
    }
}

TEST_CASE("lambda peak on the fixture") {
    // At n = 2 the growth-regime constants do not exist ((1-1/n) b = 0.75),
    // but the peak is still well defined: lambda_1 = 0.5625 dominates.
    auto profile = make_profile(kFixture, 2.0, 10, false);
    CHECK(lambda_peak_level(profile.lambda, 10) == 1);
    for (int i = 1; i < 10; ++i) CHECK(profile.lambda[i + 1] < profile.lambda[i]);
    CHECK_THROWS_AS(landmarks(kFixture, 2.0, 10), UnsupportedRegime);
}

TEST_CASE("landmarks in a supported regime") {
    Landmarks lm = landmarks(kFixture, 100.0, 50);
    CHECK(lm.rho > 1.0);
    CHECK(lm.gamma >= 1.0);
    CHECK(lm.epsilon > 0.0);
    CHECK(lm.epsilon < 1.0 - 1.0 / 3.0);
    CHECK(lm.ell1 <= lm.ellstar);
}

TEST_CASE("landmarks rejects subcritical inputs") {
    try {
        landmarks(OffspringDistribution::chain(), 2.0, 10);
        FAIL("expected UnsupportedRegime");
    } catch (const UnsupportedRegime& e) {
        CHECK(std::string(e.what()).find("branching factor") != std::string::npos);
    }
    // b > 1 but (1 - 1/n) b <= 1
    auto barely = OffspringDistribution::make({0.4, 0.0, 0.6});
    CHECK_THROWS_AS(landmarks(barely, 1.05, 50), UnsupportedRegime);
}

TEST_CASE("landmark peak equals scanned argmax") {
    auto dist = OffspringDistribution::make({0.4, 0.0, 0.6});
    auto profile = make_profile(dist, 1000.0, 200, true);
    int argmax = 1;
    for (int i = 2; i <= 200; ++i) {
        if (profile.lambda[i] > profile.lambda[argmax]) argmax = i;
    }
    CHECK(profile.landmarks->ellstar == argmax);
    CHECK(profile.landmarks->ell1 <= profile.landmarks->ellstar);
}

TEST_CASE("lambda ratio bracket on the fixture") {
    auto profile = make_profile(kFixture, 2.0, 10, false);
    double ratio = profile.lambda[2] / profile.lambda[1];
    CHECK(close(ratio, 0.26953125));
    // t'(x) = 0.375 x for this distribution at n = 2
    CHECK(close(t_prime(kFixture, 2.0, profile.phi[1]), 0.1640625));
    CHECK(close(t_prime(kFixture, 2.0, 1.0), 0.375));
    CHECK(ratio >= 0.1640625);
    CHECK(ratio <= 0.375);

    PropertyReport report = verify_lambda_properties(kFixture, profile);
    CHECK(report.all_pass());
}

TEST_CASE("lambda property checks vacuous at h=1") {
    auto profile = make_profile(kFixture, 2.0, 1, false);
    PropertyReport report = verify_lambda_properties(kFixture, profile);
    CHECK(report.all_pass());
    for (const auto& check : report.checks) CHECK(check.violation == 0.0);
}

TEST_CASE("lambda property checks across regimes") {
    auto dist = OffspringDistribution::make({0.4, 0.0, 0.6});
    auto profile = make_profile(dist, 100.0, 100, true);
    PropertyReport report = verify_lambda_properties(dist, profile);
    for (const auto& check : report.checks) {
        INFO(check.name, " violation=", check.violation);
        CHECK(check.pass);
    }
}

TEST_CASE("lambda properties on random supercritical distributions") {
    SplitMix64 rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        auto dist = qin::test::random_distribution(rng, true);
        double n = 20.0 + 200.0 * rng.next_double();
        int h = 30 + static_cast<int>(rng.next_below(60));
        BranchingProfile profile;
        try {
            profile = make_profile(dist, n, h, true);
        } catch (const UnsupportedRegime&) {
            profile = make_profile(dist, n, h, false);  // marginal (1-1/n) b
        }
        PropertyReport report = verify_lambda_properties(dist, profile);
        for (const auto& check : report.checks) {
            INFO("dist rep ", rep, " check ", check.name, " violation ", check.violation);
            CHECK(check.pass);
        }
    }
}
