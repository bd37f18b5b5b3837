#include "apex/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "apex/rootfind.hpp"

namespace apex {

namespace {

ExponentPair pick_exponents(const ModelParams& params, ExponentFamily ef) {
    return ef == ExponentFamily::beta ? exponents_beta(params) : exponents_gamma(params);
}

double payoff_raw(const OptionSpec& spec, double x, double ext) {
    // payoff without the wedge check (boundary solvers evaluate off-wedge candidates)
    if (spec.side == Side::put) {
        switch (spec.family) {
            case Family::standard:          return spec.strike - x;
            case Family::floating_lookback: return ext - spec.strike * x;
            case Family::fixed_lookback:    return ext - spec.strike;
        }
    } else {
        switch (spec.family) {
            case Family::standard:          return x - spec.strike;
            case Family::floating_lookback: return spec.strike * x - ext;
            case Family::fixed_lookback:    return spec.strike - ext;
        }
    }
    return 0.0;
}

double payoff_dx_raw(const OptionSpec& spec) {
    switch (spec.family) {
        case Family::standard:          return spec.side == Side::put ? -1.0 : 1.0;
        case Family::floating_lookback: return spec.side == Side::put ? -spec.strike : spec.strike;
        case Family::fixed_lookback:    return 0.0;
    }
    return 0.0;
}

double payoff_dext_raw(const OptionSpec& spec) {
    if (spec.family == Family::standard) return 0.0;
    return spec.side == Side::put ? 1.0 : -1.0;
}

// phi: entrance-regular regime-1 solution (W_{.,2} put / W_{.,1} call) and slope.
struct Phi {
    const ModelParams* params;
    ExponentPair gamma;
    Side side;
    double ext;

    double N(double x) const {
        const double g1 = gamma.hi, g2 = gamma.lo;
        if (side == Side::put)
            return std::pow(ext, g1) * std::pow(x, g2) - std::pow(ext, g2) * std::pow(x, g1);
        return std::pow(ext, g2) * std::pow(x, g1) - std::pow(ext, g1) * std::pow(x, g2);
    }
    double dN(double x) const {
        const double g1 = gamma.hi, g2 = gamma.lo;
        if (side == Side::put)
            return g2 * std::pow(ext, g1) * std::pow(x, g2 - 1.0)
                 - g1 * std::pow(ext, g2) * std::pow(x, g1 - 1.0);
        return g1 * std::pow(ext, g2) * std::pow(x, g1 - 1.0)
             - g2 * std::pow(ext, g1) * std::pow(x, g2 - 1.0);
    }
    double z(double x) const { return std::pow(ext / x, params->alpha); }
    double value(double x) const { return N(x) / (1.0 - z(x)); }
    double slope(double x) const {
        const double zz = z(x), u = 1.0 - zz, up = params->alpha * zz / x;
        return (dN(x) * u - N(x) * up) / (u * u);
    }
    double diagonal_value() const {
        const double g1 = gamma.hi, g2 = gamma.lo, a = params->alpha;
        return (side == Side::put ? g2 - g1 : g1 - g2) * std::pow(ext, g1 + g2) / a;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// MonotoneCubic (Fritsch-Carlson)
// ---------------------------------------------------------------------------
MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size() || n < 2) throw DomainError("MonotoneCubic: need matched grids, n >= 2");
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(x_[i + 1] > x_[i])) throw DomainError("MonotoneCubic: grid must increase");
        d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    }
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {  // clamp to preserve monotone segments
        if (d[i] == 0.0) {
            m_[i] = m_[i + 1] = 0.0;
            continue;
        }
        const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            m_[i] = t * a * d[i];
            m_[i + 1] = t * b * d[i];
        }
    }
}

double MonotoneCubic::operator()(double x) const {
    if (empty()) throw DomainError("MonotoneCubic: empty");
    const std::size_t n = x_.size();
    if (x <= x_.front()) x = x_.front();
    if (x >= x_.back()) x = x_.back();
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (x_[mid] <= x ? lo : hi) = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    const double t = (x - x_[lo]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * y_[lo] + h10 * h * m_[lo] + h01 * y_[lo + 1] + h11 * h * m_[lo + 1];
}

// ---------------------------------------------------------------------------
// BoundaryCurve
// ---------------------------------------------------------------------------
double BoundaryCurve::value(double extremum) const {
    if (info.is_ray) return info.asymptote * extremum;
    if (side == Side::put) {
        if (extremum <= domain_threshold) {
            // degenerate branch below the threshold
            return family == Family::fixed_lookback ? 0.0 : extremum;
        }
    } else {
        if (domain_threshold > 0.0 && extremum >= domain_threshold) {
            return family == Family::fixed_lookback
                       ? std::numeric_limits<double>::infinity()
                       : extremum;
        }
    }
    if (grid_extremum.empty()) throw MissingBoundaryError("BoundaryCurve: empty grid");
    // Extension outside the tabulated range: the standard-family boundary tends to
    // a constant far from the diagonal (extend with the edge value); the lookback
    // boundaries are asymptotically proportional to the extremum (extend the ratio).
    const bool deep_side = side == Side::put ? extremum >= grid_extremum.back()
                                             : extremum <= grid_extremum.front();
    if (deep_side && family == Family::standard) {
        return side == Side::put ? grid_boundary.back() : grid_boundary.front();
    }
    const double ratio = interp(std::log(extremum));
    return ratio * extremum;
}

bool BoundaryCurve::covers(double extremum) const {
    if (info.is_ray) return extremum > 0.0;
    if (grid_extremum.empty()) return false;
    if (side == Side::put && extremum <= domain_threshold) return true;
    if (side == Side::call && domain_threshold > 0.0 && extremum >= domain_threshold)
        return true;
    return true;  // extension policy documented in value()
}

// ---------------------------------------------------------------------------
// Closed forms and scalar equations
// ---------------------------------------------------------------------------
double boundary_standard_j0(const OptionSpec& spec, const ModelParams& params) {
    if (spec.family != Family::standard)
        throw DomainError("boundary_standard_j0: family 1 only");
    const auto b = exponents_beta(params);
    return spec.side == Side::put ? b.lo * spec.strike / (b.lo - 1.0)
                                  : b.hi * spec.strike / (b.hi - 1.0);
}

namespace {

// Residual of the power equation (g71la)/(h71la).
double power_equation_residual(const OptionSpec& spec, const ExponentPair& ep, double t) {
    const double e1 = ep.hi, e2 = ep.lo, k = spec.strike;
    const double q1 = e2 * (1.0 - k * t) + k * t;
    const double q2 = e1 * (1.0 - k * t) + k * t;
    const double lhs = std::pow(t, e1 - e2);
    const double rhs = (e1 - 1.0) * q1 / ((e2 - 1.0) * q2);
    return lhs - rhs;
}

// Pole-free form (the raw ratio has a pole where e1(1-kt)+kt vanishes, which a
// sign-change scan would miscount): same roots, multiplied through by the
// denominator with its sign tracked.
double power_equation_residual_cleared(const OptionSpec& spec, const ExponentPair& ep,
                                       double t) {
    const double e1 = ep.hi, e2 = ep.lo, k = spec.strike;
    const double q1 = e2 * (1.0 - k * t) + k * t;
    const double q2 = e1 * (1.0 - k * t) + k * t;
    return (e2 - 1.0) * q2 * std::pow(t, e1 - e2) - (e1 - 1.0) * q1;
}

}  // namespace

double root_power_equation(const OptionSpec& spec, const ModelParams& params,
                           ExponentFamily expo_family) {
    if (spec.family != Family::floating_lookback)
        throw DomainError("root_power_equation: family 2 only");
    const auto ep = pick_exponents(params, expo_family);
    auto f = [&](double t) { return power_equation_residual_cleared(spec, ep, t); };
    if (spec.side == Side::put) {
        return extreme_root(f, 1e-9, 1.0 - 1e-12, /*maximal=*/false, 4000);
    }
    return extreme_root(f, 1.0 + 1e-12, 1e6, /*maximal=*/false, 4000);
}

int power_equation_sign_changes(const OptionSpec& spec, const ModelParams& params,
                                ExponentFamily expo_family, int n_probes) {
    const auto ep = pick_exponents(params, expo_family);
    auto f = [&](double t) { return power_equation_residual_cleared(spec, ep, t); };
    const double eps = 1e-6;
    auto scan = spec.side == Side::put
                    ? scan_sign_changes(f, eps, 1.0 - eps, n_probes)
                    : scan_sign_changes(f, 1.0 + eps, 1e4, n_probes);
    return scan.sign_changes;
}

// ---------------------------------------------------------------------------
// Smooth-fit coefficients and the boundary ODE
// ---------------------------------------------------------------------------
TwoPowerCoefficients smooth_fit_coefficients(const OptionSpec& spec, const ExponentPair& ep,
                                             double extremum, double boundary) {
    if (!(boundary > 0.0)) throw DomainError("smooth_fit_coefficients: boundary must be > 0");
    const double e[2] = {ep.hi, ep.lo};
    if (e[0] == e[1]) throw DegenerateError("smooth_fit_coefficients: equal exponents");
    const double g = payoff_raw(spec, boundary, extremum);
    const double gx = payoff_dx_raw(spec);
    const double gs = payoff_dext_raw(spec);
    TwoPowerCoefficients out{};
    for (int l = 0; l < 2; ++l) {
        const double em = e[1 - l], el = e[l];
        const double den = (em - el) * std::pow(boundary, el);
        const double num = em * g - boundary * gx;
        out.c[l] = num / den;
        out.ds[l] = em * gs / den;
        // payoffs are linear: d/db (em*G - b*Gx) = (em - 1) Gx
        out.da[l] = ((em - 1.0) * gx - el * num / boundary) / den;
    }
    return out;
}

double boundary_ode_rhs(const OptionSpec& spec, const ModelParams& params,
                        ExponentFamily expo_family, double extremum, double boundary,
                        const EntranceFn* entrance) {
    const auto ep = pick_exponents(params, expo_family);
    const auto co = smooth_fit_coefficients(spec, ep, extremum, boundary);
    const double p1 = std::pow(extremum, ep.hi), p2 = std::pow(extremum, ep.lo);
    double num = -(co.ds[0] * p1 + co.ds[1] * p2);
    if (entrance) {
        const double v_diag = co.c[0] * p1 + co.c[1] * p2;
        num += params.alpha / extremum * ((*entrance)(extremum) - v_diag);
    }
    const double den = co.da[0] * p1 + co.da[1] * p2;
    if (den == 0.0 || !std::isfinite(den))
        throw DegenerateError("boundary_ode_rhs: vanishing denominator");
    return num / den;
}

double boundary_ode_rhs_family3_explicit(const OptionSpec& spec, const ModelParams& params,
                                         ExponentFamily expo_family, double extremum,
                                         double boundary) {
    if (spec.family != Family::fixed_lookback)
        throw DomainError("family3 explicit RHS: family 3 only");
    const auto ep = pick_exponents(params, expo_family);
    const double e1 = ep.hi, e2 = ep.lo;
    const double t1 = std::pow(extremum / boundary, e1);
    const double t2 = std::pow(extremum / boundary, e2);
    // (extremum - strike) on both sides: s - L3 for the put and q - K3 for the
    // call (the sign of the per-side factor follows from the smooth-fit system)
    const double denom_ext = extremum - spec.strike;
    if (denom_ext == 0.0) throw SingularityError("family3 RHS: extremum at the strike");
    const double den = e1 * e2 * (t1 - t2);
    if (den == 0.0) throw DegenerateError("family3 RHS: degenerate denominator");
    return boundary / denom_ext * (e2 * t1 - e1 * t2) / den;
}

// ---------------------------------------------------------------------------
// Extremal boundary construction
// ---------------------------------------------------------------------------
namespace {

struct OdeCurve {
    OdeResult<1> res;
    bool crashed = false;
    double crash_at = 0.0;
};

OdeCurve integrate_boundary(const OptionSpec& spec, const ModelParams& params,
                            ExponentFamily ef, const EntranceFn* entrance,
                            double s_from, double a_from, double s_to,
                            const EnvelopeOptions& opt) {
    OdeRhs<1> rhs = [&, ef](double s, const std::array<double, 1>& y) {
        return std::array<double, 1>{
            boundary_ode_rhs(spec, params, ef, s, y[0], entrance)};
    };
    // crash = boundary meeting the diagonal
    OdeEvent<1> ev = [side = spec.side](double s, const std::array<double, 1>& y) {
        return side == Side::put ? s * (1.0 - 1e-9) - y[0] : y[0] - s * (1.0 + 1e-9);
    };
    OdeOptions oo;
    oo.rel_tol = opt.ode_rel_tol;
    oo.abs_tol = opt.ode_abs_tol;
    OdeCurve out;
    try {
        out.res = integrate_ode<1>(rhs, s_from, s_to, {a_from}, oo, &ev);
        out.crashed = out.res.event_hit;
        if (out.crashed) out.crash_at = out.res.event_time;
    } catch (const Error&) {
        out.crashed = true;
        out.crash_at = s_from;
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, const GridSpec& g) {
    const double decades = std::log10(hi / lo);
    int n = static_cast<int>(std::ceil(decades * g.points_per_decade)) + 1;
    n = std::clamp(n, 16, g.max_points);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return out;
}

BoundaryCurve make_curve_from_samples(const OptionSpec& spec, Regime j,
                                      const std::vector<double>& ext,
                                      const std::vector<double>& val,
                                      double threshold, BoundarySolverInfo info) {
    BoundaryCurve bc;
    bc.side = spec.side;
    bc.family = spec.family;
    bc.regime = j;
    bc.strike = spec.strike;
    bc.domain_threshold = threshold;
    bc.grid_extremum = ext;
    bc.grid_boundary = val;
    bc.info = std::move(info);
    std::vector<double> u(ext.size()), ratio(ext.size());
    for (std::size_t i = 0; i < ext.size(); ++i) {
        u[i] = std::log(ext[i]);
        ratio[i] = val[i] / ext[i];
    }
    bc.interp = MonotoneCubic(std::move(u), std::move(ratio));
    return bc;
}

}  // namespace

BoundaryCurve solve_extremal_boundary(const OptionSpec& spec, const ModelParams& params,
                                      ExponentFamily expo_family, const GridSpec& grid,
                                      const EntranceFn* entrance,
                                      const EnvelopeOptions& opt) {
    const bool put = spec.side == Side::put;
    const double K = spec.strike;

    // Family 2 is an exact ray; exposed here so the envelope machinery can be
    // validated against it, but the production curve is built by the ray root.
    double thr = 0.0;
    double lo = grid.lo, hi = grid.hi;
    if (spec.family == Family::fixed_lookback) {
        thr = K;
        if (put) {
            if (lo <= 0.0) lo = thr * 1.002;
            if (hi <= 0.0) hi = thr * 1000.0;
            lo = std::max(lo, thr * (1.0 + 1e-7));
        } else {
            if (hi <= 0.0) hi = thr * 0.998;
            if (lo <= 0.0) lo = thr / 1000.0;
            hi = std::min(hi, thr * (1.0 - 1e-7));
        }
    } else {
        if (lo <= 0.0) lo = K / 10.0;
        if (hi <= 0.0) hi = K * 100.0;
    }
    auto ext_grid = log_grid(lo, hi, grid);

    BoundarySolverInfo info;
    info.ode_rel_tol = opt.ode_rel_tol;
    info.method = spec.family == Family::standard ? "anchored" : "envelope";

    std::vector<double> prev, cur(ext_grid.size());
    double last_gap = std::numeric_limits<double>::infinity();
    double detected_threshold = put ? 0.0 : std::numeric_limits<double>::infinity();
    if (spec.family == Family::fixed_lookback) detected_threshold = thr;

    for (int m = 0; m < opt.max_anchors; ++m) {
        double anchor_ext;
        OdeCurve curve;
        if (spec.family == Family::standard) {
            // anchored at the decaying-entrance asymptote (ab01 value)
            const double a_inf = boundary_standard_j0(spec, params);
            anchor_ext = put ? hi * std::pow(2.0, m + 2) : lo / std::pow(2.0, m + 2);
            curve = integrate_boundary(spec, params, expo_family, entrance, anchor_ext,
                                       a_inf, put ? lo : hi, opt);
        } else {
            // receding anchors with per-anchor bisection between curves that crash
            // into the diagonal and curves that stay admissible
            anchor_ext = put ? (thr > 0.0 ? thr * (1.0 + std::pow(2.0, m))
                                          : hi * std::pow(2.0, m))
                             : (thr > 0.0 ? thr / (1.0 + std::pow(2.0, m))
                                          : lo / std::pow(2.0, m));
            if (put && anchor_ext < hi * 2.0) continue;       // anchor must clear the grid
            if (!put && anchor_ext > lo * 0.5) continue;
            const double target = put ? lo : hi;
            double good = put ? anchor_ext * 1e-8 : anchor_ext * 1e8;
            double bad = put ? anchor_ext * (1.0 - 1e-7) : anchor_ext * (1.0 + 1e-7);
            {
                auto probe = integrate_boundary(spec, params, expo_family, entrance,
                                                anchor_ext, good, target, opt);
                if (probe.crashed) {
                    throw ConvergenceError(
                        "solve_extremal_boundary: even the deep-side start crashed");
                }
            }
            for (int it = 0; it < opt.bisect_iters; ++it) {
                const double mid = std::sqrt(good * bad);  // geometric bisection
                auto probe = integrate_boundary(spec, params, expo_family, entrance,
                                                anchor_ext, mid, target, opt);
                (probe.crashed ? bad : good) = mid;
            }
            curve = integrate_boundary(spec, params, expo_family, entrance, anchor_ext,
                                       good, target, opt);
            if (curve.crashed) {
                // fall back inside the good value by one more notch
                curve = integrate_boundary(spec, params, expo_family, entrance, anchor_ext,
                                           put ? good * (1.0 - 1e-12) : good * (1.0 + 1e-12),
                                           target, opt);
            }
        }
        info.anchor_count += 1;

        if (curve.crashed) {
            // the maximal/minimal solution touches the diagonal inside the grid:
            // record an existence edge and truncate
            detected_threshold = curve.crash_at;
        }
        // cubic Hermite sampling between accepted steps (slopes from the ODE itself)
        auto sample = [&](double s) {
            const auto& ts = curve.res.t;
            const auto& ys = curve.res.y;
            if (ts.size() < 2) return ys.front()[0];
            const bool inc = ts.back() > ts.front();
            std::size_t lo_i = 0, hi_i = ts.size() - 1;
            const double tq = inc ? std::clamp(s, ts.front(), ts.back())
                                  : std::clamp(s, ts.back(), ts.front());
            while (hi_i - lo_i > 1) {
                const std::size_t mid = (lo_i + hi_i) / 2;
                ((ts[mid] <= tq) == inc ? lo_i : hi_i) = mid;
            }
            const double h = ts[hi_i] - ts[lo_i];
            if (h == 0.0) return ys[lo_i][0];
            const double t = (tq - ts[lo_i]) / h;
            double k0 = 0.0, k1 = 0.0;
            try {
                k0 = boundary_ode_rhs(spec, params, expo_family, ts[lo_i], ys[lo_i][0], entrance);
                k1 = boundary_ode_rhs(spec, params, expo_family, ts[hi_i], ys[hi_i][0], entrance);
            } catch (const Error&) {
                return ys[lo_i][0] * (1.0 - t) + ys[hi_i][0] * t;
            }
            const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
            const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
            return h00 * ys[lo_i][0] + h10 * h * k0 + h01 * ys[hi_i][0] + h11 * h * k1;
        };
        for (std::size_t i = 0; i < ext_grid.size(); ++i) {
            const double s = ext_grid[i];
            const bool beyond = put ? (curve.crashed && s < curve.crash_at)
                                    : (curve.crashed && s > curve.crash_at);
            cur[i] = beyond ? s : sample(s);
        }
        if (!prev.empty()) {
            last_gap = 0.0;
            for (std::size_t i = 0; i < cur.size(); ++i)
                last_gap = std::max(last_gap, std::abs(cur[i] - prev[i]));
            if (last_gap < opt.converge_tol) {
                prev = cur;
                break;
            }
        }
        prev = cur;
    }
    if (prev.empty()) throw ConvergenceError("solve_extremal_boundary: no anchors run");
    if (!(last_gap < opt.converge_tol) && info.anchor_count > 1) {
        std::ostringstream os;
        os << "solve_extremal_boundary: envelope gap " << last_gap
           << " above tolerance " << opt.converge_tol;
        throw ConvergenceError(os.str());
    }
    info.envelope_gap = last_gap == std::numeric_limits<double>::infinity() ? 0.0 : last_gap;
    info.existence_threshold = detected_threshold;
    if (spec.family == Family::standard) info.asymptote = boundary_standard_j0(spec, params);
    return make_curve_from_samples(spec, Regime::j0, ext_grid, prev,
                                   spec.family == Family::fixed_lookback ? thr
                                   : put ? detected_threshold
                                         : (std::isfinite(detected_threshold)
                                                ? detected_threshold
                                                : 0.0),
                                   info);
}

// ---------------------------------------------------------------------------
// Regime-1 boundary
// ---------------------------------------------------------------------------
double h_root_j1(const OptionSpec& spec, const ModelParams& params, double extremum) {
    auto h = [&](double x) {
        return h_function(spec, params, StatePoint{x, extremum}, Regime::j1);
    };
    if (spec.side == Side::put) {
        return extreme_root(h, extremum * 1e-8, extremum * (1.0 - 1e-10), true, 4000);
    }
    return extreme_root(h, extremum * (1.0 + 1e-10), extremum * 1e8, false, 4000);
}

BoundaryJ1Result boundary_j1(const OptionSpec& spec, const ModelParams& params,
                             const FundamentalSolutionParams& fsp, double extremum) {
    BoundaryJ1Result out;
    if (spec.family == Family::fixed_lookback) {
        // degenerate rule: the frozen extremum decides immediately
        if (spec.side == Side::put) {
            const bool itm = extremum > spec.strike;
            out.boundary = itm ? extremum : 0.0;
            out.entrance_value = itm ? extremum - spec.strike : 0.0;
        } else {
            const bool itm = extremum < spec.strike;
            out.boundary = itm ? extremum : std::numeric_limits<double>::infinity();
            out.entrance_value = itm ? spec.strike - extremum : 0.0;
        }
        return out;
    }

    const Phi phi{&params, fsp.gamma, spec.side, extremum};
    auto G = [&](double x) { return payoff_raw(spec, x, extremum); };
    const double gx = payoff_dx_raw(spec);
    auto T = [&](double x) { return G(x) * phi.slope(x) - gx * phi.value(x); };

    const bool put = spec.side == Side::put;
    // scan in the gap variable u = |x/extremum - 1| so roots hugging the diagonal
    // (small extremum) are resolved as well as deep roots
    auto T_of_u = [&](double u) {
        return T(put ? extremum * (1.0 - u) : extremum * (1.0 + u));
    };
    auto scan_u = scan_sign_changes(T_of_u, 1e-12, put ? 1.0 - 1e-8 : 1e7, 4000);
    BracketScan scan;
    for (const auto& bu : scan_u.brackets) {
        const double x1 = put ? extremum * (1.0 - bu.second) : extremum * (1.0 + bu.first);
        const double x2 = put ? extremum * (1.0 - bu.first) : extremum * (1.0 + bu.second);
        scan.brackets.emplace_back(x1, x2);  // increasing in x either way
    }
    if (put) std::reverse(scan.brackets.begin(), scan.brackets.end());
    if (scan.brackets.empty()) {
        throw NoRootError("boundary_j1: no root of the entrance equation at this extremum");
    }
    // Validate candidates (positive multiplier; value majorizes the payoff on the
    // continuation side) and keep the maximal (put) / minimal (call) admissible root.
    auto admissible = [&](double root, double kap) {
        if (!(kap > 0.0)) return false;
        const double c0 = put ? root : extremum;
        const double c1 = put ? extremum : root;
        for (int i = 1; i <= 24; ++i) {
            const double x = c0 * std::pow(c1 / c0, i / 25.0);
            if (kap * phi.value(x) < G(x) - 1e-9 * (std::abs(G(root)) + 1.0)) return false;
        }
        return true;
    };
    double best = std::numeric_limits<double>::quiet_NaN();
    const auto& bks = scan.brackets;
    for (std::size_t idx = 0; idx < bks.size(); ++idx) {
        const auto& bk = put ? bks[bks.size() - 1 - idx] : bks[idx];
        const double root =
            bk.first == bk.second ? bk.first : brent(T, bk.first, bk.second);
        const double kap = G(root) / phi.value(root);
        if (admissible(root, kap)) {
            best = root;
            break;
        }
    }
    if (!std::isfinite(best)) {
        throw NoRootError("boundary_j1: no admissible root (outside the existence range)");
    }
    out.boundary = best;
    out.kappa = G(best) / phi.value(best);
    out.entrance_value = out.kappa * phi.diagonal_value();
    const double scale = std::abs(G(best) * phi.slope(best)) + std::abs(gx * phi.value(best));
    out.equation_residual = std::abs(T(best)) / (scale > 0.0 ? scale : 1.0);
    return out;
}

double existence_threshold_j1(const OptionSpec& spec, const ModelParams& params,
                              const FundamentalSolutionParams& fsp,
                              double probe_lo, double probe_hi) {
    auto exists = [&](double ext) {
        try {
            boundary_j1(spec, params, fsp, ext);
            return true;
        } catch (const NoRootError&) {
            return false;
        }
    };
    const bool put = spec.side == Side::put;
    double good = put ? probe_hi : probe_lo;
    double bad = put ? probe_lo : probe_hi;
    if (!exists(good)) throw NoRootError("existence_threshold_j1: no root anywhere in range");
    if (exists(bad)) return put ? 0.0 : std::numeric_limits<double>::infinity();
    for (int i = 0; i < 60; ++i) {
        const double mid = std::sqrt(good * bad);
        (exists(mid) ? good : bad) = mid;
    }
    return good;
}

// ---------------------------------------------------------------------------
// Uninformed benchmark (gamma family)
// ---------------------------------------------------------------------------
double appendix_boundary_standard(const OptionSpec& spec, const ModelParams& params) {
    if (spec.family != Family::standard)
        throw DomainError("appendix_boundary_standard: family 1 only");
    const auto g = exponents_gamma(params);
    return spec.side == Side::put ? g.lo * spec.strike / (g.lo - 1.0)
                                  : g.hi * spec.strike / (g.hi - 1.0);
}

BoundaryCurve appendix_boundary_curve(const OptionSpec& spec, const ModelParams& params,
                                      const GridSpec& grid) {
    BoundarySolverInfo info;
    info.method = "appendix";
    if (spec.family == Family::standard) {
        const double g1 = appendix_boundary_standard(spec, params);
        double lo = grid.lo > 0.0 ? grid.lo : spec.strike / 10.0;
        double hi = grid.hi > 0.0 ? grid.hi : spec.strike * 100.0;
        auto ext = log_grid(lo, hi, grid);
        std::vector<double> val(ext.size(), g1);
        info.asymptote = g1;
        return make_curve_from_samples(spec, Regime::j0, ext, val,
                                       spec.side == Side::put ? 0.0 : 0.0, info);
    }
    if (spec.family == Family::floating_lookback) {
        const double slope = root_power_equation(spec, params, ExponentFamily::gamma);
        double lo = grid.lo > 0.0 ? grid.lo : spec.strike / 10.0;
        double hi = grid.hi > 0.0 ? grid.hi : spec.strike * 100.0;
        auto ext = log_grid(lo, hi, grid);
        std::vector<double> val(ext.size());
        for (std::size_t i = 0; i < ext.size(); ++i) val[i] = slope * ext[i];
        info.is_ray = true;
        info.asymptote = slope;
        return make_curve_from_samples(spec, Regime::j0, ext, val, 0.0, info);
    }
    return solve_extremal_boundary(spec, params, ExponentFamily::gamma, grid, nullptr);
}

// ---------------------------------------------------------------------------
double insider_ray_root(const OptionSpec& spec, const ModelParams& params) {
    if (spec.family != Family::floating_lookback)
        throw DomainError("insider_ray_root: family 2 only");
    const auto fsp = make_fundamental_params(params);
    const auto j1 = boundary_j1(spec, params, fsp, 1.0);
    const double e_unit = j1.entrance_value;  // E_2(s) = e_unit * s by scale invariance
    const auto ep = exponents_beta(params);
    auto resid = [&](double t) {
        const auto co = smooth_fit_coefficients(spec, ep, 1.0, t);
        const double v = co.c[0] + co.c[1];
        const double lhs = (1.0 - ep.hi) * co.c[0] + (1.0 - ep.lo) * co.c[1];
        return lhs - params.alpha * (e_unit - v);
    };
    if (spec.side == Side::put) return extreme_root(resid, 1e-6, 1.0 - 1e-10, false, 4000);
    return extreme_root(resid, 1.0 + 1e-10, 1e5, false, 4000);
}

OrderingCheck check_theorem21_ordering(const OptionSpec& spec, const ModelParams& params,
                                       Regime j, double extremum, double boundary,
                                       double appendix_value) {
    OrderingCheck out;
    const bool put = spec.side == Side::put;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (j == Regime::j0) {
        switch (spec.family) {
            case Family::standard:
                out.cap_h = params.r * spec.strike / params.delta_prime;
                break;
            case Family::floating_lookback:
                out.cap_h = params.r * extremum / (params.delta_prime * spec.strike);
                break;
            case Family::fixed_lookback:
                out.cap_h = nan;  // H has constant sign in x
                break;
        }
    } else {
        try {
            out.cap_h = h_root_j1(spec, params, extremum);
        } catch (const Error&) {
            out.cap_h = nan;
        }
    }
    if (std::isnan(appendix_value)) {
        switch (spec.family) {
            case Family::standard:
                out.cap_appendix = appendix_boundary_standard(spec, params);
                break;
            case Family::floating_lookback:
                out.cap_appendix =
                    root_power_equation(spec, params, ExponentFamily::gamma) * extremum;
                break;
            case Family::fixed_lookback:
                out.cap_appendix = nan;
                break;
        }
    } else {
        out.cap_appendix = appendix_value;
    }
    auto within = [&](double cap) {
        if (std::isnan(cap)) return true;
        return put ? boundary < cap : boundary > cap;
    };
    out.within_h_cap = within(out.cap_h);
    out.within_appendix_cap = within(out.cap_appendix);
    return out;
}

}  // namespace apex
