#include <doctest.h>

#include <cmath>
#include <random>

#include "apex/hyp2f1.hpp"
#include "apex/errors.hpp"

using namespace apex;

TEST_CASE("hyp2f1 basic values") {
    // empty sum leaves the leading 1
    CHECK(hyp2f1(0.7, -1.3, 2.2, 0.0) == doctest::Approx(1.0));
    CHECK(hyp2f1(0.0, 1.0, 2.0, 0.3) == doctest::Approx(1.0));

    // F(1,1;2;z) = -ln(1-z)/z
    CHECK(hyp2f1(1.0, 1.0, 2.0, 0.5)
          == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-13));
    for (double z : {0.1, 0.3, 0.45}) {
        CHECK(hyp2f1(1.0, 1.0, 2.0, z)
              == doctest::Approx(-std::log(1.0 - z) / z).epsilon(1e-13));
    }

    // F(a,b;b;z) = (1-z)^{-a}
    CHECK(hyp2f1(2.0, 3.7, 3.7, 0.25) == doctest::Approx(16.0 / 9.0).epsilon(1e-13));
    CHECK(hyp2f1(-1.5, 2.2, 2.2, 0.4)
          == doctest::Approx(std::pow(0.6, 1.5)).epsilon(1e-13));
}

TEST_CASE("hyp2f1 domain errors") {
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 0.0, 0.3), DomainError);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, -2.0, 0.3), DomainError);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 2.0, -0.1), DomainError);
}

TEST_CASE("hyp2f1 matches the compensated reference series") {
    std::mt19937_64 eng(7);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
    };
    int done = 0;
    while (done < 300) {
        const double a = uni(-3.0, 3.0), b = uni(-3.0, 3.0), c = uni(0.3, 4.0);
        const double z = uni(0.0, 0.9);
        const double e = c - a - b;
        if (std::abs(e - std::round(e)) < 1e-3) continue;  // log case deferred to the ODE backend
        double v, ref;
        try {
            v = hyp2f1(a, b, c, z);
            ref = hyp2f1_series_ref(a, b, c, z);
        } catch (const ConvergenceError&) {
            continue;
        }
        ++done;
        CHECK(v == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK(done == 300);
}

TEST_CASE("hyp2f1 z->1-z transformation path agrees with the slow series") {
    // z > 0.5 engages the connection formula; the raw series still converges
    // (slowly), providing the independent check
    const double v = hyp2f1(0.3, -0.7, 1.9, 0.8);
    const double ref = hyp2f1_series_ref(0.3, -0.7, 1.9, 0.8);
    CHECK(v == doctest::Approx(ref).epsilon(1e-11));

    // integer c-a-b raises for the caller to use the ODE backend
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, 2.0, 0.8), ConvergenceError);
}

TEST_CASE("hyp2f1 derivative matches finite differences") {
    const double a = 0.8, b = -1.7, c = 2.3, z = 0.3, h = 1e-6;
    const double fd = (hyp2f1(a, b, c, z + h) - hyp2f1(a, b, c, z - h)) / (2 * h);
    CHECK(hyp2f1_dz(a, b, c, z) == doctest::Approx(fd).epsilon(1e-8));
}
