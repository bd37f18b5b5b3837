#include "apex/fundamental.hpp"

#include <cmath>

#include "apex/hyp2f1.hpp"

namespace apex {

namespace {

double azema_z(const ModelParams& params, const StatePoint& p, Side side) {
    check_wedge(p, side);
    return std::pow(p.extremum / p.x, params.alpha);
}

// Numerator of a fundamental mode: N(x) = c1 x^{p1} + c2 x^{p2}; W = N / (1 - z).
struct Mode {
    double c1, p1, c2, p2;
    double N(double x) const { return c1 * std::pow(x, p1) + c2 * std::pow(x, p2); }
    double dN(double x) const {
        return c1 * p1 * std::pow(x, p1 - 1.0) + c2 * p2 * std::pow(x, p2 - 1.0);
    }
    double d2N(double x) const {
        return c1 * p1 * (p1 - 1.0) * std::pow(x, p1 - 2.0)
             + c2 * p2 * (p2 - 1.0) * std::pow(x, p2 - 2.0);
    }
};

// k = 1: increasing branch, k = 2: decreasing branch (see header).
Mode make_mode(const FundamentalSolutionParams& fsp, int k, double extremum, Side side) {
    const double g1 = fsp.gamma.hi, g2 = fsp.gamma.lo;
    if (side == Side::put) {
        if (k == 1) return Mode{1.0, g1, 0.0, 0.0};
        return Mode{std::pow(extremum, g1), g2, -std::pow(extremum, g2), g1};
    }
    if (k == 1) return Mode{std::pow(extremum, g2), g1, -std::pow(extremum, g1), g2};
    return Mode{1.0, g2, 0.0, 0.0};
}

bool mode_is_entrance_regular(int k, Side side) {
    return (side == Side::put) ? k == 2 : k == 1;
}

}  // namespace

FundamentalSolutionParams make_fundamental_params(const ModelParams& params) {
    FundamentalSolutionParams fsp;
    fsp.params = params;
    fsp.beta = exponents_beta(params);
    fsp.gamma = exponents_gamma(params);
    const double a = params.alpha;
    const double gam[2] = {fsp.gamma.hi, fsp.gamma.lo};
    const double bet[2] = {fsp.beta.hi, fsp.beta.lo};
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) fsp.chi[k][l] = 1.0 + (gam[k] - bet[l]) / a;
        fsp.kappa[k] = 1.0 + (2.0 / a) * (gam[k] - 0.5 + (params.r - params.delta) / params.sigma2());
        fsp.series_c[k] = -2.0 * gam[k] / a;
    }
    fsp.paper_exponent = 1.0 - 2.0 / params.sigma;
    fsp.derived_exponent = -1.0;

    // Arbitrate the prefactor exponent by the ODE residual at a probe point.
    const Side side = params.admissible_side();
    const double ext = 1.0;
    auto residual_of_form = [&](double expo, double power) {
        // candidate w = x^{power} (1-z)^{expo}, finite differences
        auto w = [&](double xx) {
            const double z = std::pow(ext / xx, params.alpha);
            return std::pow(xx, power) * std::pow(1.0 - z, expo);
        };
        const double x0 = side == Side::put ? 0.75 : 4.0 / 3.0;
        const double h = 1e-5 * x0;
        const double w0 = w(x0), wp = w(x0 + h), wm = w(x0 - h);
        const double wx = (wp - wm) / (2.0 * h);
        const double wxx = (wp - 2.0 * w0 + wm) / (h * h);
        const StatePoint pt{x0, ext};
        const double res = regime_ode_residual(params, side, Regime::j1, pt, w0, wx, wxx);
        const double scale = std::abs(params.r * w0) + std::abs(wx * x0) + 1e-300;
        return std::abs(res) / scale;
    };
    fsp.paper_form_passes_residual =
        residual_of_form(fsp.paper_exponent, side == Side::put ? fsp.gamma.lo : fsp.gamma.hi) < 1e-5;
    fsp.derived_form_passes_residual =
        residual_of_form(fsp.derived_exponent, side == Side::put ? fsp.gamma.hi : fsp.gamma.lo) < 1e-5;
    return fsp;
}

double fundamental_solution(const FundamentalSolutionParams& fsp, int k,
                            const StatePoint& p, Side side) {
    if (k != 1 && k != 2) throw DomainError("fundamental_solution: k must be 1 or 2");
    const double z = azema_z(fsp.params, p, side);
    if (z == 1.0) {
        if (!mode_is_entrance_regular(k, side)) {
            throw SingularityError("fundamental_solution: divergent branch on the diagonal");
        }
        return fundamental_entrance_value(fsp, p.extremum, side);
    }
    // Per-branch series template x^{gamma_k} (1-z)^{e} F(C-1, 0; C; z) with the
    // derived data e = -1, C = -2 gamma_k / alpha; F degenerates to 1, which is
    // what makes the closed form elementary.
    auto branch = [&](int kb) {  // kb = 0 (gamma1) or 1 (gamma2)
        const double g = kb == 0 ? fsp.gamma.hi : fsp.gamma.lo;
        const double c = fsp.series_c[kb];
        const double f = hyp2f1(c - 1.0, 0.0, c, z);
        return std::pow(p.x, g) * std::pow(1.0 - z, fsp.derived_exponent) * f;
    };
    const double g1 = fsp.gamma.hi, g2 = fsp.gamma.lo;
    const double E = p.extremum;
    if (side == Side::put) {
        if (k == 1) return branch(0);
        return std::pow(E, g1) * branch(1) - std::pow(E, g2) * branch(0);
    }
    if (k == 1) return std::pow(E, g2) * branch(0) - std::pow(E, g1) * branch(1);
    return branch(1);
}

double fundamental_solution_dx(const FundamentalSolutionParams& fsp, int k,
                               const StatePoint& p, Side side) {
    const double z = azema_z(fsp.params, p, side);
    if (z == 1.0) throw SingularityError("fundamental_solution_dx: on the diagonal");
    const Mode m = make_mode(fsp, k, p.extremum, side);
    const double a = fsp.params.alpha;
    const double u = 1.0 - z;
    const double up = a * z / p.x;  // d(1-z)/dx
    const double N = m.N(p.x), Np = m.dN(p.x);
    return (Np * u - N * up) / (u * u);
}

double fundamental_solution_dxx(const FundamentalSolutionParams& fsp, int k,
                                const StatePoint& p, Side side) {
    const double z = azema_z(fsp.params, p, side);
    if (z == 1.0) throw SingularityError("fundamental_solution_dxx: on the diagonal");
    const Mode m = make_mode(fsp, k, p.extremum, side);
    const double a = fsp.params.alpha;
    const double x = p.x;
    const double u = 1.0 - z;
    const double up = a * z / x;
    const double upp = -a * (a + 1.0) * z / (x * x);
    const double N = m.N(x), Np = m.dN(x), Npp = m.d2N(x);
    return Npp / u - 2.0 * Np * up / (u * u) - N * upp / (u * u)
           + 2.0 * N * up * up / (u * u * u);
}

double fundamental_entrance_value(const FundamentalSolutionParams& fsp,
                                  double extremum, Side side) {
    const double g1 = fsp.gamma.hi, g2 = fsp.gamma.lo, a = fsp.params.alpha;
    const double v = (side == Side::put ? (g2 - g1) : (g1 - g2))
                     * std::pow(extremum, g1 + g2) / a;
    return v;
}

double regime_ode_residual(const ModelParams& params, Side side, Regime j,
                           const StatePoint& p, double w, double wx, double wxx) {
    const double z = azema_z(params, p, side);
    const double drift = asset_drift_rate(params, z, j);
    return 0.5 * params.sigma2() * p.x * p.x * wxx + drift * p.x * wx - params.r * w;
}

double frobenius_exponent_at_diagonal(const ModelParams& params, double extremum) {
    // Integrate a generic solution toward the diagonal and fit the local power
    // of W against (1 - z).
    const double a = params.alpha;
    auto x_of_z = [&](double z) { return extremum * std::pow(z, -1.0 / a); };
    const double x0 = x_of_z(0.5);
    const double x1 = x_of_z(1.0 - 1e-3);
    const double x2 = x_of_z(1.0 - 1e-4);
    OdeRhs<2> rhs = [&](double x, const std::array<double, 2>& y) {
        const double z = std::pow(extremum / x, a);
        const double drift = asset_drift_rate(params, z, Regime::j1);
        return std::array<double, 2>{
            y[1], (params.r * y[0] - drift * x * y[1]) / (0.5 * params.sigma2() * x * x)};
    };
    OdeOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-13;
    auto r1 = integrate_ode<2>(rhs, x0, x1, {1.0, 0.0}, opt);
    auto r2 = integrate_ode<2>(rhs, x1, x2, r1.y.back(), opt);
    const double w1 = std::abs(r1.y.back()[0]);
    const double w2 = std::abs(r2.y.back()[0]);
    return (std::log(w2) - std::log(w1)) / (std::log(1e-4) - std::log(1e-3));
}

std::vector<double> ode_integrate_w(const ModelParams& params, Side side, Regime j,
                                    double extremum, const std::vector<double>& x_grid,
                                    std::array<double, 2> init) {
    if (x_grid.size() < 2) throw DomainError("ode_integrate_w: need at least two grid points");
    for (double x : x_grid) check_wedge(StatePoint{x, extremum}, side);
    OdeRhs<2> rhs = [&, extremum](double x, const std::array<double, 2>& y) {
        const double z = std::pow(extremum / x, params.alpha);
        const double drift = asset_drift_rate(params, std::min(z, 1.0 - 1e-300), j);
        return std::array<double, 2>{
            y[1], (params.r * y[0] - drift * x * y[1]) / (0.5 * params.sigma2() * x * x)};
    };
    OdeOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-14;
    std::vector<double> out(x_grid.size());
    out[0] = init[0];
    std::array<double, 2> y = init;
    for (std::size_t i = 1; i < x_grid.size(); ++i) {
        auto res = integrate_ode<2>(rhs, x_grid[i - 1], x_grid[i], y, opt);
        y = res.y.back();
        out[i] = y[0];
    }
    return out;
}

}  // namespace apex
