#include <doctest.h>

#include <cmath>
#include <random>

#include "apex/model.hpp"

using namespace apex;

namespace {
const ModelParams kPut = build_params(0.08, 0.10, 0.20);   // alpha = -2
const ModelParams kCall = build_params(0.10, 0.05, 0.30);  // alpha = 1/9
}  // namespace

TEST_CASE("build_params derives alpha and delta_prime") {
    CHECK(kPut.alpha == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(kPut.delta_prime == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(kPut.admissible_side() == Side::put);

    CHECK(kCall.alpha == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    CHECK(kCall.delta_prime == doctest::Approx(0.06).epsilon(1e-13));
    CHECK(kCall.admissible_side() == Side::call);

    // delta_prime = 2*0.05 - 0.05 - 0.16 = -0.11 < 0
    CHECK_THROWS_AS(build_params(0.05, 0.05, 0.40), ParameterError);
    // r = delta + sigma^2/2 makes alpha vanish
    CHECK_THROWS_AS(build_params(0.10, 0.08, 0.20), ParameterError);
    CHECK_THROWS_AS(build_params(-0.01, 0.10, 0.20), ParameterError);
    CHECK_THROWS_AS(build_params(0.08, 0.0, 0.20), ParameterError);
}

TEST_CASE("admissibility wedge on a parameter grid") {
    // put side requires (delta + sigma^2)/2 < r < delta + sigma^2/2
    for (double r = 0.01; r <= 0.201; r += 0.01) {
        for (double delta = 0.01; delta <= 0.201; delta += 0.02) {
            for (double sigma : {0.1, 0.2, 0.35}) {
                const double dprime = 2 * r - delta - sigma * sigma;
                const double alpha = 2 * (r - delta) / (sigma * sigma) - 1;
                const bool ok = dprime > 0 && alpha != 0;
                if (!ok) {
                    CHECK_THROWS_AS(build_params(r, delta, sigma), ParameterError);
                    continue;
                }
                const auto p = build_params(r, delta, sigma);
                const bool put_ok = alpha < 0;
                CHECK((p.admissible_side() == Side::put) == put_ok);
                CHECK((alpha < 0) == (r < delta + sigma * sigma / 2));
                if (put_ok) CHECK(r > (delta + sigma * sigma) / 2 - 1e-12);
            }
        }
    }
}

TEST_CASE("payoff table") {
    auto put1 = make_spec(Family::standard, Side::put, 1.0);
    CHECK(payoff(put1, {0.6, 1.0}) == doctest::Approx(0.4).epsilon(1e-15));
    auto call2 = make_spec(Family::floating_lookback, Side::call, 1.0);
    CHECK(payoff(call2, {2.0, 1.5}) == doctest::Approx(0.5).epsilon(1e-15));
    auto put3 = make_spec(Family::fixed_lookback, Side::put, 1.0);
    CHECK(payoff(put3, {0.8, 1.0}) == doctest::Approx(0.0));

    CHECK(payoff_dx(put1, {0.6, 1.0}) == -1.0);
    auto call2b = make_spec(Family::floating_lookback, Side::call, 0.8);
    CHECK(payoff_dx(call2b, {2.0, 1.5}) == doctest::Approx(0.8));
    CHECK(payoff_dx(put3, {0.8, 1.0}) == 0.0);
    auto call3 = make_spec(Family::fixed_lookback, Side::call, 1.0);
    CHECK(payoff_dx(call3, {2.0, 1.5}) == 0.0);

    CHECK_THROWS_AS(payoff(put1, {1.2, 1.0}), DomainError);   // x > s
    CHECK_THROWS_AS(payoff(call2, {1.0, 1.5}), DomainError);  // x < q
}

TEST_CASE("azema supermartingale") {
    CHECK(azema_supermartingale(kPut, {0.5, 1.0}, Side::put)
          == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(azema_supermartingale(kPut, {1.0, 1.0}, Side::put) == doctest::Approx(1.0));
    CHECK(azema_supermartingale(kCall, {0.7, 0.7}, Side::call) == doctest::Approx(1.0));
    // the other branch of each formula is identically 1
    CHECK(azema_supermartingale(kCall, {0.5, 1.0}, Side::put) == doctest::Approx(1.0));
    double v = azema_supermartingale(kCall, {1.3, 0.9}, Side::call);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("drift adjustment") {
    // j=1 branch: alpha*sigma*z/(1-z)
    CHECK(drift_adjustment(kPut, 0.5, Regime::j1, Side::put)
          == doctest::Approx(-0.4).epsilon(1e-14));
    // j=0 branch is constant in z
    CHECK(drift_adjustment(kPut, 0.9, Regime::j0, Side::put)
          == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(drift_adjustment(kPut, 0.2, Regime::j0, Side::put)
          == doctest::Approx(drift_adjustment(kPut, 0.9, Regime::j0, Side::put)));
    CHECK_THROWS_AS(drift_adjustment(kCall, 1.0, Regime::j1, Side::call), SingularityError);
    CHECK_THROWS_AS(drift_adjustment(kPut, 0.5, Regime::j1, Side::call), DomainError);

    // j=1 magnitude is monotone in z and diverges toward the diagonal, with the
    // sign of alpha*sigma
    double prev = 0.0;
    for (double z : {0.1, 0.5, 0.9, 0.99, 0.9999}) {
        const double v = drift_adjustment(kPut, z, Regime::j1, Side::put);
        CHECK(v < 0.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < -1e3);

    // the asset rate drift under j=0 equals r - delta_prime
    CHECK(asset_drift_rate(kPut, 0.37, Regime::j0)
          == doctest::Approx(kPut.r - kPut.delta_prime).epsilon(1e-14));
    // and equals r - delta + sigma * psi under j=1
    const double z = 0.4;
    CHECK(asset_drift_rate(kPut, z, Regime::j1)
          == doctest::Approx(kPut.r - kPut.delta
                             + kPut.sigma * drift_adjustment(kPut, z, Regime::j1, Side::put))
                 .epsilon(1e-12));
}

TEST_CASE("H functions") {
    auto put1 = make_spec(Family::standard, Side::put, 1.0);
    // H_{1,1,0} = delta' x - r L1: affine with slope delta', root at r L1/delta' = 4
    const double h1 = h_function(put1, kPut, {0.5, 6.0}, Regime::j0);
    const double h2 = h_function(put1, kPut, {1.5, 6.0}, Regime::j0);
    CHECK((h2 - h1) / 1.0 == doctest::Approx(kPut.delta_prime).epsilon(1e-12));
    CHECK(h_function(put1, kPut, {4.0, 6.0}, Regime::j0) == doctest::Approx(0.0).epsilon(1e-14));

    // H_{3,1,0} = r (L3 - s), independent of x
    auto put3 = make_spec(Family::fixed_lookback, Side::put, 1.0);
    const double a = h_function(put3, kPut, {0.3, 2.0}, Regime::j0);
    const double b = h_function(put3, kPut, {1.9, 2.0}, Regime::j0);
    CHECK(a == doctest::Approx(kPut.r * (1.0 - 2.0)).epsilon(1e-13));
    CHECK(a == doctest::Approx(b).epsilon(1e-13));

    CHECK_THROWS_AS(h_function(put1, kPut, {2.0, 2.0}, Regime::j1), SingularityError);
}

TEST_CASE("exponents: quadratics, ordering, Vieta") {
    const double s5 = std::sqrt(5.0);
    const auto be = exponents_beta(kPut);
    CHECK(be.hi == doctest::Approx(-1.0 + s5).epsilon(1e-13));
    CHECK(be.lo == doctest::Approx(-1.0 - s5).epsilon(1e-13));
    const auto ga = exponents_gamma(kPut);
    CHECK(ga.hi == doctest::Approx(1.0 + s5).epsilon(1e-13));
    CHECK(ga.lo == doctest::Approx(1.0 - s5).epsilon(1e-13));

    std::mt19937_64 eng(42);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
    };
    int tested = 0;
    while (tested < 200) {
        const double r = uni(0.01, 0.25), d = uni(0.01, 0.25), s = uni(0.05, 0.6);
        ModelParams p;
        try {
            p = build_params(r, d, s);
        } catch (const ParameterError&) {
            continue;
        }
        ++tested;
        const auto b = exponents_beta(p);
        const auto g = exponents_gamma(p);
        CHECK(b.lo < 0.0);
        CHECK(b.hi > 1.0);
        CHECK(g.lo < 0.0);
        CHECK(g.hi > 1.0);
        auto quad = [&](double t, double carry) {
            return 0.5 * p.sigma2() * t * (t - 1.0) + (p.r - carry) * t - p.r;
        };
        for (double t : {b.hi, b.lo}) CHECK(std::abs(quad(t, p.delta_prime)) < 1e-12);
        for (double t : {g.hi, g.lo}) CHECK(std::abs(quad(t, p.delta)) < 1e-12);
        // Vieta identities
        CHECK(b.hi * b.lo == doctest::Approx(-2.0 * p.r / p.sigma2()).epsilon(1e-12));
        CHECK(b.hi + b.lo
              == doctest::Approx(1.0 - 2.0 * (p.r - p.delta_prime) / p.sigma2()).epsilon(1e-12));
        CHECK(g.hi * g.lo == doctest::Approx(-2.0 * p.r / p.sigma2()).epsilon(1e-12));
        CHECK(g.hi + g.lo
              == doctest::Approx(1.0 - 2.0 * (p.r - p.delta) / p.sigma2()).epsilon(1e-12));
        // cross relation used by the regime-1 machinery
        CHECK(b.hi == doctest::Approx(g.hi + p.alpha).epsilon(1e-11));
        CHECK(b.lo == doctest::Approx(g.lo + p.alpha).epsilon(1e-11));
    }
}
