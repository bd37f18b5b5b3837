#include "apex/model.hpp"

#include <sstream>

namespace apex {

ModelParams build_params(double r, double delta, double sigma) {
    if (!(r > 0.0) || !(delta > 0.0) || !(sigma > 0.0)) {
        throw ParameterError("build_params: r, delta, sigma must all be positive");
    }
    ModelParams p;
    p.r = r;
    p.delta = delta;
    p.sigma = sigma;
    p.alpha = 2.0 * (r - delta) / (sigma * sigma) - 1.0;
    p.delta_prime = 2.0 * r - delta - sigma * sigma;
    if (!(p.delta_prime > 0.0)) {
        std::ostringstream os;
        os << "build_params: delta_prime = " << p.delta_prime
           << " <= 0 (need 2r - delta - sigma^2 > 0)";
        throw ParameterError(os.str());
    }
    if (p.alpha == 0.0) {
        throw ParameterError("build_params: alpha = 0, both Azema branches degenerate");
    }
    return p;
}

OptionSpec make_spec(Family family, Side side, double strike) {
    if (!(strike > 0.0)) throw ParameterError("make_spec: strike must be positive");
    return OptionSpec{family, side, strike};
}

void check_wedge(const StatePoint& p, Side side) {
    const bool ok = side == Side::put
                        ? (p.x > 0.0 && p.x <= p.extremum)
                        : (p.extremum > 0.0 && p.extremum <= p.x);
    if (!ok) {
        std::ostringstream os;
        os << "state point (x=" << p.x << ", extremum=" << p.extremum
           << ") outside the " << (side == Side::put ? "put" : "call") << " wedge";
        throw DomainError(os.str());
    }
}

double payoff(const OptionSpec& spec, const StatePoint& p) {
    check_wedge(p, spec.side);
    if (spec.side == Side::put) {
        switch (spec.family) {
            case Family::standard:          return spec.strike - p.x;
            case Family::floating_lookback: return p.extremum - spec.strike * p.x;
            case Family::fixed_lookback:    return p.extremum - spec.strike;
        }
    } else {
        switch (spec.family) {
            case Family::standard:          return p.x - spec.strike;
            case Family::floating_lookback: return spec.strike * p.x - p.extremum;
            case Family::fixed_lookback:    return spec.strike - p.extremum;
        }
    }
    throw DomainError("payoff: invalid family");
}

double payoff_dx(const OptionSpec& spec, const StatePoint&) {
    if (spec.side == Side::put) {
        switch (spec.family) {
            case Family::standard:          return -1.0;
            case Family::floating_lookback: return -spec.strike;
            case Family::fixed_lookback:    return 0.0;
        }
    } else {
        switch (spec.family) {
            case Family::standard:          return 1.0;
            case Family::floating_lookback: return spec.strike;
            case Family::fixed_lookback:    return 0.0;
        }
    }
    throw DomainError("payoff_dx: invalid family");
}

double payoff_dext(const OptionSpec& spec) {
    const double sgn = spec.side == Side::put ? 1.0 : -1.0;
    return spec.family == Family::standard ? 0.0 : sgn;
}

double azema_supermartingale(const ModelParams& params, const StatePoint& p, Side side) {
    check_wedge(p, side);
    if (side == Side::put) {
        if (params.alpha >= 0.0) return 1.0;
        return std::pow(p.extremum / p.x, params.alpha);
    }
    if (params.alpha <= 0.0) return 1.0;
    return std::pow(p.extremum / p.x, params.alpha);
}

double drift_adjustment(const ModelParams& params, double z, Regime j, Side side) {
    if (side != params.admissible_side()) {
        throw DomainError("drift_adjustment: side does not match the sign of alpha");
    }
    if (!(z > 0.0) || z > 1.0) throw DomainError("drift_adjustment: z must lie in (0, 1]");
    if (j == Regime::j0) return -params.alpha * params.sigma;
    if (z == 1.0) {
        throw SingularityError("drift_adjustment: j=1 at z=1 (x on the extremum diagonal)");
    }
    return params.alpha * params.sigma * z / (1.0 - z);
}

double asset_drift_rate(const ModelParams& params, double z, Regime j) {
    if (j == Regime::j0) return params.r - params.delta_prime;
    if (z == 1.0) {
        throw SingularityError("asset_drift_rate: j=1 at z=1");
    }
    return params.r - params.delta + params.sigma2() * params.alpha * z / (1.0 - z);
}

double h_function(const OptionSpec& spec, const ModelParams& params,
                  const StatePoint& p, Regime j) {
    const double z = azema_supermartingale(params, p, spec.side);
    if (j == Regime::j1 && z == 1.0) {
        throw SingularityError("h_function: j=1 on the diagonal");
    }
    return payoff_dx(spec, p) * asset_drift_rate(params, z, j) * p.x
           - params.r * payoff(spec, p);
}

namespace {
ExponentPair quadratic_exponents(const ModelParams& params, double carry) {
    // roots of (sigma^2/2) t (t - 1) + (r - carry) t - r = 0
    const double s2 = params.sigma2();
    const double m = 0.5 - (params.r - carry) / s2;
    const double d = std::sqrt(m * m + 2.0 * params.r / s2);
    return ExponentPair{m + d, m - d};
}
}  // namespace

ExponentPair exponents_beta(const ModelParams& params) {
    return quadratic_exponents(params, params.delta_prime);
}

ExponentPair exponents_gamma(const ModelParams& params) {
    return quadratic_exponents(params, params.delta);
}

}  // namespace apex
