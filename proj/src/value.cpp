#include "apex/value.hpp"

#include <cmath>

namespace apex {

namespace {

int entrance_branch(Side side) { return side == Side::put ? 2 : 1; }

bool in_stopping(double x, double bnd, Side side) {
    return side == Side::put ? x <= bnd : x >= bnd;
}

}  // namespace

CoefficientPair coefficients_j0(const OptionSpec& spec, const ModelParams& params,
                                double boundary, double extremum) {
    const bool put = spec.side == Side::put;
    if (put && !(boundary < extremum && boundary > 0.0))
        throw DomainError("coefficients_j0: need 0 < boundary < extremum on the put side");
    if (!put && !(boundary > extremum))
        throw DomainError("coefficients_j0: need boundary > extremum on the call side");
    const auto co = smooth_fit_coefficients(spec, exponents_beta(params), extremum, boundary);
    return CoefficientPair{co.c[0], co.c[1]};
}

EntranceFn make_entrance_fn(const OptionSpec& spec, const ModelParams& params,
                            const FundamentalSolutionParams& fsp) {
    if (spec.family == Family::fixed_lookback) {
        const double k = spec.strike;
        if (spec.side == Side::put) {
            return [k](double s) { return s > k ? s - k : 0.0; };
        }
        return [k](double q) { return q < k ? k - q : 0.0; };
    }
    if (spec.family == Family::floating_lookback) {
        // scale invariance: E_2(s) = E_2(1) s
        const double slope = boundary_j1(spec, params, fsp, 1.0).entrance_value;
        return [slope](double s) { return slope * s; };
    }
    return [spec, params, fsp](double s) {
        return boundary_j1(spec, params, fsp, s).entrance_value;
    };
}

PricingModel PricingModel::build(const OptionSpec& spec, const ModelParams& params,
                                 const GridSpec& grid) {
    if (spec.side != params.admissible_side()) {
        throw ParameterError("PricingModel: spec side does not match the sign of alpha");
    }
    PricingModel m;
    m.spec_ = spec;
    m.params_ = params;
    m.fsp_ = make_fundamental_params(params);

    const EntranceFn entrance = make_entrance_fn(spec, params, m.fsp_);
    const bool put = spec.side == Side::put;

    // regime-0 boundary
    if (spec.family == Family::floating_lookback) {
        const double slope = insider_ray_root(spec, params);
        GridSpec g = grid;
        double lo = g.lo > 0.0 ? g.lo : spec.strike / 10.0;
        double hi = g.hi > 0.0 ? g.hi : spec.strike * 100.0;
        const int n = 64;
        std::vector<double> ext(n), val(n);
        for (int i = 0; i < n; ++i) {
            ext[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
            val[i] = slope * ext[i];
        }
        BoundaryCurve bc;
        bc.side = spec.side;
        bc.family = spec.family;
        bc.regime = Regime::j0;
        bc.strike = spec.strike;
        bc.grid_extremum = ext;
        bc.grid_boundary = val;
        bc.info.is_ray = true;
        bc.info.asymptote = slope;
        bc.info.method = "entrance-coupled ray";
        std::vector<double> u(ext.size()), ratio(ext.size(), slope);
        for (std::size_t i = 0; i < ext.size(); ++i) u[i] = std::log(ext[i]);
        bc.interp = MonotoneCubic(u, ratio);
        m.j0_ = bc;
    } else {
        m.j0_ = solve_extremal_boundary(spec, params, ExponentFamily::beta, grid, &entrance);
    }

    // regime-1 boundary
    {
        BoundaryCurve bc;
        bc.side = spec.side;
        bc.family = spec.family;
        bc.regime = Regime::j1;
        bc.strike = spec.strike;
        bc.info.method = "entrance equation";
        if (spec.family == Family::fixed_lookback) {
            bc.domain_threshold = spec.strike;
            const double lo = put ? spec.strike * 1.0001 : spec.strike / 1000.0;
            const double hi = put ? spec.strike * 1000.0 : spec.strike * 0.9999;
            const int n = 16;
            std::vector<double> ext(n), val(n), u(n), ratio(n, 1.0);
            for (int i = 0; i < n; ++i) {
                ext[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
                val[i] = ext[i];
                u[i] = std::log(ext[i]);
            }
            bc.grid_extremum = ext;
            bc.grid_boundary = val;
            bc.interp = MonotoneCubic(u, ratio);
        } else {
            double lo = m.j0_.grid_extremum.front(), hi = m.j0_.grid_extremum.back();
            const int n = std::min<int>(512, static_cast<int>(m.j0_.grid_extremum.size()));
            std::vector<double> ext(n), val(n), u(n), ratio(n);
            for (int i = 0; i < n; ++i) {
                ext[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
                const auto r = boundary_j1(spec, params, m.fsp_, ext[i]);
                val[i] = r.boundary;
                u[i] = std::log(ext[i]);
                ratio[i] = val[i] / ext[i];
            }
            bc.grid_extremum = ext;
            bc.grid_boundary = val;
            bc.interp = MonotoneCubic(u, ratio);
            if (spec.family == Family::floating_lookback) {
                bc.info.is_ray = true;
                bc.info.asymptote = ratio.front();
            }
        }
        m.j1_ = bc;
    }
    if (spec.family == Family::floating_lookback) {
        m.fam2_entrance_slope_ = boundary_j1(spec, params, m.fsp_, 1.0).entrance_value;
    }

    // uninformed benchmark boundary
    m.appendix_ = appendix_boundary_curve(spec, params, grid);

    // family-3 sub-threshold continuation coefficients
    if (spec.family == Family::fixed_lookback) {
        const double thr = spec.strike;
        const double s_edge = put ? m.j0_.grid_extremum.front() : m.j0_.grid_extremum.back();
        {
            const auto co = smooth_fit_coefficients(spec, exponents_beta(params), s_edge,
                                                    m.j0_.value(s_edge));
            // growing mode toward the diagonal edge wins as the boundary collapses
            const double c_edge = put ? co.c[0] : co.c[1];
            m.subthreshold_coef_ = c_edge * std::pow(s_edge / thr, params.alpha);
        }
        {
            const double s_edge2 =
                put ? m.appendix_.grid_extremum.front() : m.appendix_.grid_extremum.back();
            const auto co = smooth_fit_coefficients(spec, exponents_gamma(params), s_edge2,
                                                    m.appendix_.value(s_edge2));
            // reflection-only: the sub-threshold value is extremum-independent
            m.appendix_subthr_coef_ = put ? co.c[0] : co.c[1];
        }
    }
    return m;
}

double PricingModel::entrance_value(double extremum) const {
    switch (spec_.family) {
        case Family::standard:
            return boundary_j1(spec_, params_, fsp_, extremum).entrance_value;
        case Family::floating_lookback:
            return fam2_entrance_slope_ * extremum;
        case Family::fixed_lookback:
            if (spec_.side == Side::put)
                return extremum > spec_.strike ? extremum - spec_.strike : 0.0;
            return extremum < spec_.strike ? spec_.strike - extremum : 0.0;
    }
    throw DomainError("entrance_value: invalid family");
}

double PricingModel::j1_kappa(double extremum, double* boundary_out) const {
    const double bnd = j1_.value(extremum);
    if (boundary_out) *boundary_out = bnd;
    const StatePoint pb{bnd, extremum};
    const double w = fundamental_solution(fsp_, entrance_branch(spec_.side), pb, spec_.side);
    const double g = payoff(spec_, pb);
    return g / w;
}

ValueResult PricingModel::value(const StatePoint& p, Regime j) const {
    check_wedge(p, spec_.side);
    const bool put = spec_.side == Side::put;
    const double ext = p.extremum;
    ValueResult out;
    out.regime = j;

    if (j == Regime::j1) {
        if (spec_.family == Family::fixed_lookback) {
            const bool itm = put ? ext > spec_.strike : ext < spec_.strike;
            if (!itm) {
                out.region = RegionTag::degenerate_never_stop;
                out.value = 0.0;
                out.gradient_x = 0.0;
                return out;
            }
            out.region = RegionTag::stopping;
            out.value = payoff(spec_, p);
            out.gradient_x = payoff_dx(spec_, p);
            return out;
        }
        double bnd;
        const double kap = j1_kappa(ext, &bnd);
        if (in_stopping(p.x, bnd, spec_.side)) {
            out.region = RegionTag::stopping;
            out.value = payoff(spec_, p);
            out.gradient_x = payoff_dx(spec_, p);
            return out;
        }
        out.region = RegionTag::continuation;
        const int k = entrance_branch(spec_.side);
        if (p.x == ext) {
            out.value = kap * fundamental_entrance_value(fsp_, ext, spec_.side);
            return out;
        }
        out.value = kap * fundamental_solution(fsp_, k, p, spec_.side);
        out.gradient_x = kap * fundamental_solution_dx(fsp_, k, p, spec_.side);
        return out;
    }

    // regime 0
    if (spec_.family == Family::fixed_lookback) {
        const bool below_thr = put ? ext <= spec_.strike : ext >= spec_.strike;
        if (below_thr) {
            const auto be = exponents_beta(params_);
            const double e = put ? be.hi : be.lo;
            const double f = std::pow(ext / spec_.strike, -params_.alpha);
            out.region = RegionTag::continuation;
            out.value = subthreshold_coef_ * f * std::pow(p.x, e);
            out.gradient_x = subthreshold_coef_ * f * e * std::pow(p.x, e - 1.0);
            return out;
        }
    }
    const double bnd = j0_.value(ext);
    if (in_stopping(p.x, bnd, spec_.side)) {
        out.region = RegionTag::stopping;
        out.value = payoff(spec_, p);
        out.gradient_x = payoff_dx(spec_, p);
        return out;
    }
    const auto be = exponents_beta(params_);
    const auto co = smooth_fit_coefficients(spec_, be, ext, bnd);
    out.region = RegionTag::continuation;
    out.value = co.c[0] * std::pow(p.x, be.hi) + co.c[1] * std::pow(p.x, be.lo);
    out.gradient_x = co.c[0] * be.hi * std::pow(p.x, be.hi - 1.0)
                   + co.c[1] * be.lo * std::pow(p.x, be.lo - 1.0);
    return out;
}

double PricingModel::value_dx(const StatePoint& p, Regime j) const {
    const auto v = value(p, j);
    if (v.gradient_x) return *v.gradient_x;
    throw DomainError("value_dx: gradient unavailable at this point");
}

double PricingModel::value_dxx(const StatePoint& p, Regime j) const {
    check_wedge(p, spec_.side);
    if (classify_region(p, j) != RegionTag::continuation)
        return 0.0;  // payoffs are linear
    if (j == Regime::j1) {
        const double kap = j1_kappa(p.extremum);
        return kap * fundamental_solution_dxx(fsp_, entrance_branch(spec_.side), p, spec_.side);
    }
    const auto be = exponents_beta(params_);
    if (spec_.family == Family::fixed_lookback) {
        const bool put = spec_.side == Side::put;
        const bool below_thr = put ? p.extremum <= spec_.strike : p.extremum >= spec_.strike;
        if (below_thr) {
            const double e = put ? be.hi : be.lo;
            const double f = std::pow(p.extremum / spec_.strike, -params_.alpha);
            return subthreshold_coef_ * f * e * (e - 1.0) * std::pow(p.x, e - 2.0);
        }
    }
    const auto co = smooth_fit_coefficients(spec_, be, p.extremum, j0_.value(p.extremum));
    return co.c[0] * be.hi * (be.hi - 1.0) * std::pow(p.x, be.hi - 2.0)
         + co.c[1] * be.lo * (be.lo - 1.0) * std::pow(p.x, be.lo - 2.0);
}

RegionTag PricingModel::classify_region(const StatePoint& p, Regime j) const {
    check_wedge(p, spec_.side);
    const bool put = spec_.side == Side::put;
    if (spec_.family == Family::fixed_lookback) {
        const bool below_thr = put ? p.extremum <= spec_.strike : p.extremum >= spec_.strike;
        if (below_thr)
            return j == Regime::j1 ? RegionTag::degenerate_never_stop
                                   : RegionTag::continuation;
        if (j == Regime::j1) return RegionTag::stopping;
    }
    const double bnd = boundary(j).value(p.extremum);
    return in_stopping(p.x, bnd, spec_.side) ? RegionTag::stopping
                                                    : RegionTag::continuation;
}

double PricingModel::pde_residual(const StatePoint& p, Regime j) const {
    const double w = value(p, j).value;
    const double wx = value_dx(p, j);
    const double wxx = value_dxx(p, j);
    return regime_ode_residual(params_, spec_.side, j, p, w, wx, wxx);
}

double PricingModel::normal_reflection_residual(double extremum) const {
    const bool put = spec_.side == Side::put;
    const double ext = extremum;
    if (spec_.family == Family::fixed_lookback) {
        const bool below_thr = put ? ext <= spec_.strike : ext >= spec_.strike;
        if (below_thr) {
            // closed-form sub-threshold branch: dV/ds = -(alpha/s) V and E = 0
            const auto vres = value(StatePoint{ext, ext}, Regime::j0);
            const double ds = -params_.alpha / ext * vres.value;
            const double gap = (0.0 - vres.value) * params_.alpha / ext;
            return ds - gap;
        }
    }
    // d/ds of the coefficients along the solved boundary (chain rule through a(s))
    const auto be = exponents_beta(params_);
    const double bnd = j0_.value(ext);
    const auto co = smooth_fit_coefficients(spec_, be, ext, bnd);
    const EntranceFn entrance = [this](double s) { return entrance_value(s); };
    const double slope = boundary_ode_rhs(spec_, params_, ExponentFamily::beta, ext, bnd,
                                          &entrance);
    const double p1 = std::pow(ext, be.hi), p2 = std::pow(ext, be.lo);
    const double ds_v = (co.ds[0] + co.da[0] * slope) * p1
                      + (co.ds[1] + co.da[1] * slope) * p2;
    const double v_diag = co.c[0] * p1 + co.c[1] * p2;
    const double gap = (entrance_value(ext) - v_diag) * params_.alpha / ext;
    return ds_v - gap;
}

ValueResult PricingModel::value_appendix(const StatePoint& p) const {
    check_wedge(p, spec_.side);
    const bool put = spec_.side == Side::put;
    ValueResult out;
    out.regime = Regime::j0;
    const auto ga = exponents_gamma(params_);
    if (spec_.family == Family::fixed_lookback) {
        const bool below_thr = put ? p.extremum <= spec_.strike : p.extremum >= spec_.strike;
        if (below_thr) {
            const double e = put ? ga.hi : ga.lo;
            out.region = RegionTag::continuation;
            out.value = appendix_subthr_coef_ * std::pow(p.x, e);
            out.gradient_x = appendix_subthr_coef_ * e * std::pow(p.x, e - 1.0);
            return out;
        }
    }
    const double bnd = appendix_.value(p.extremum);
    if (in_stopping(p.x, bnd, spec_.side)) {
        out.region = RegionTag::stopping;
        out.value = payoff(spec_, p);
        out.gradient_x = payoff_dx(spec_, p);
        return out;
    }
    const auto co = smooth_fit_coefficients(spec_, ga, p.extremum, bnd);
    out.region = RegionTag::continuation;
    out.value = co.c[0] * std::pow(p.x, ga.hi) + co.c[1] * std::pow(p.x, ga.lo);
    out.gradient_x = co.c[0] * ga.hi * std::pow(p.x, ga.hi - 1.0)
                   + co.c[1] * ga.lo * std::pow(p.x, ga.lo - 1.0);
    return out;
}

double PricingModel::value_appendix_dx(const StatePoint& p) const {
    const auto v = value_appendix(p);
    return v.gradient_x.value_or(0.0);
}

}  // namespace apex
