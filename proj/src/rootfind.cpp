#include "apex/rootfind.hpp"

#include <algorithm>

namespace apex {

BracketScan scan_sign_changes(const std::function<double(double)>& f,
                              double lo, double hi, int n_probes) {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("scan_sign_changes: need 0 < lo < hi");
    BracketScan out;
    const double step = std::log(hi / lo) / (n_probes - 1);
    double xprev = lo, fprev = f(lo);
    for (int i = 1; i < n_probes; ++i) {
        const double x = lo * std::exp(step * i);
        const double fx = f(x);
        if (std::isfinite(fprev) && std::isfinite(fx) && fprev * fx < 0.0) {
            out.brackets.emplace_back(xprev, x);
            ++out.sign_changes;
        }
        if (fx == 0.0) {
            out.brackets.emplace_back(x, x);
            ++out.sign_changes;
        }
        xprev = x;
        fprev = fx;
    }
    return out;
}

double brent(const std::function<double(double)>& f, double a, double b,
             double xtol, double rtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw RootError("brent: bracket does not straddle a root");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * rtol * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;  // bisection
        } else {
            double p, q;
            const double s = fb / fa;
            if (a == c) {  // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {  // inverse quadratic
                const double qq = fa / fc, rr = fb / fc;
                p = s * (2.0 * m * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;
            }
        }
        a = b; fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
    }
    throw ConvergenceError("brent: max iterations reached");
}

double extreme_root(const std::function<double(double)>& f, double lo, double hi,
                    bool maximal, int n_probes) {
    auto scan = scan_sign_changes(f, lo, hi, n_probes);
    if (scan.brackets.empty()) throw NoRootError("extreme_root: no sign change in bracket");
    const auto& bk = maximal ? scan.brackets.back() : scan.brackets.front();
    if (bk.first == bk.second) return bk.first;
    return brent(f, bk.first, bk.second);
}

}  // namespace apex
