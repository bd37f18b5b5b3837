#include "apex/hyp2f1.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace apex {

namespace {

constexpr int kMaxTerms = 10000;
constexpr double kRelTol = 1e-15;

bool is_nonpositive_integer(double x, double tol = 1e-12) {
    return x <= tol && std::abs(x - std::round(x)) < tol;
}

bool is_integer(double x, double tol = 1e-10) {
    return std::abs(x - std::round(x)) < tol;
}

void check_params(double c) {
    if (is_nonpositive_integer(c)) {
        std::ostringstream os;
        os << "hyp2f1: c = " << c << " is a non-positive integer";
        throw DomainError(os.str());
    }
}

// Plain forward series with Neumaier-compensated accumulation.
double series(double a, double b, double c, double z, int max_terms, bool* converged) {
    double sum = 1.0, comp = 0.0;
    double term = 1.0;
    for (int m = 0; m < max_terms; ++m) {
        term *= (a + m) * (b + m) / ((c + m) * (m + 1.0)) * z;
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if (term == 0.0 || std::abs(term) < kRelTol * std::abs(sum)) {
            *converged = true;
            return sum + comp;
        }
    }
    *converged = false;
    return sum + comp;
}

double gamma_ratio(double num1, double num2, double den1, double den2) {
    // Gamma(num1) Gamma(num2) / (Gamma(den1) Gamma(den2)) via lgamma with sign tracking.
    auto lg = [](double x, double& sgn) {
        if (x > 0.0) {
            sgn = 1.0;
            return std::lgamma(x);
        }
        if (x == std::floor(x)) {  // pole
            sgn = 1.0;
            return std::numeric_limits<double>::infinity();
        }
        // Gamma alternates sign on (-n-1, -n): negative on (-1,0), positive on (-2,-1), ...
        const long long n = static_cast<long long>(std::floor(-x));
        sgn = (n % 2 == 0) ? -1.0 : 1.0;
        return std::lgamma(x);
    };
    double s1, s2, s3, s4;
    const double v = lg(num1, s1) + lg(num2, s2) - lg(den1, s3) - lg(den2, s4);
    return s1 * s2 * s3 * s4 * std::exp(v);
}

}  // namespace

double hyp2f1(double a, double b, double c, double z) {
    check_params(c);
    if (z < 0.0 || z >= 1.0) throw DomainError("hyp2f1: z must lie in [0, 1)");
    if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;

    bool converged = false;
    if (z <= 0.5) {
        const double v = series(a, b, c, z, kMaxTerms, &converged);
        if (!converged) throw ConvergenceError("hyp2f1: series did not converge");
        return v;
    }

    // Terminating series converge for any z in [0,1).
    if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) {
        const double v = series(a, b, c, z, kMaxTerms, &converged);
        if (!converged) throw ConvergenceError("hyp2f1: terminating series stalled");
        return v;
    }

    const double e = c - a - b;
    if (is_integer(e)) {
        // The z -> 1-z connection formula degenerates (log case); defer to callers.
        throw ConvergenceError("hyp2f1: c-a-b integer, z>0.5 needs the ODE backend");
    }
    const double w = 1.0 - z;
    bool ok1 = false, ok2 = false;
    const double f1 = series(a, b, a + b - c + 1.0, w, kMaxTerms, &ok1);
    const double f2 = series(c - a, c - b, c - a - b + 1.0, w, kMaxTerms, &ok2);
    if (!ok1 || !ok2) throw ConvergenceError("hyp2f1: transformed series did not converge");
    const double g1 = gamma_ratio(c, e, c - a, c - b);
    const double g2 = gamma_ratio(c, -e, a, b);
    return g1 * f1 + g2 * std::pow(w, e) * f2;
}

double hyp2f1_series_ref(double a, double b, double c, double z, int max_terms) {
    check_params(c);
    if (z < 0.0 || z >= 1.0) throw DomainError("hyp2f1_series_ref: z must lie in [0, 1)");
    bool converged = false;
    const double v = series(a, b, c, z, max_terms, &converged);
    if (!converged) throw ConvergenceError("hyp2f1_series_ref: series did not converge");
    return v;
}

double hyp2f1_dz(double a, double b, double c, double z) {
    return a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z);
}

}  // namespace apex
