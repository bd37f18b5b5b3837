#pragma once

#include <cmath>
#include <optional>

#include "apex/errors.hpp"

namespace apex {

enum class Side { put, call };

// Contract family: 1 standard, 2 floating-strike lookback, 3 fixed-strike lookback.
enum class Family : int { standard = 1, floating_lookback = 2, fixed_lookback = 3 };

// Regime flag: 0 before the announced global extremum, 1 after.
enum class Regime : int { j0 = 0, j1 = 1 };

inline int regime_index(Regime j) { return static_cast<int>(j); }

// Market triple (per-year rates, per-sqrt-year volatility) with derived exponents.
//
// alpha       = 2(r - delta)/sigma^2 - 1
// delta_prime = 2r - delta - sigma^2   (the paper also writes delta + alpha*sigma;
//               only the sigma^2 scaling is consistent with the rest of the formulas,
//               so delta_prime = 2r - delta - sigma^2 is used throughout)
//
// Put-side machinery (running maximum) requires alpha < 0, call-side alpha > 0;
// delta_prime > 0 is required on both sides.
struct ModelParams {
    double r = 0.0;
    double delta = 0.0;
    double sigma = 0.0;
    double alpha = 0.0;
    double delta_prime = 0.0;

    double sigma2() const { return sigma * sigma; }
    Side admissible_side() const { return alpha < 0.0 ? Side::put : Side::call; }
};

ModelParams build_params(double r, double delta, double sigma);

struct OptionSpec {
    Family family = Family::standard;
    Side side = Side::put;
    double strike = 1.0;  // L_i on the put side, K_i on the call side
};

OptionSpec make_spec(Family family, Side side, double strike);

// Point of the state wedge: 0 < x <= extremum (put side, extremum = running max s)
// or 0 < extremum <= x (call side, extremum = running min q).
struct StatePoint {
    double x = 0.0;
    double extremum = 0.0;
};

void check_wedge(const StatePoint& p, Side side);

// Payoff table: G1 = L1 - x, G2 = s - L2 x, G3 = s - L3;
//               F1 = x - K1, F2 = K2 x - q, F3 = K3 - q.
double payoff(const OptionSpec& spec, const StatePoint& p);
double payoff_dx(const OptionSpec& spec, const StatePoint& p);
// d/d extremum of the payoff (0, 1, 1 put side; 0, -1, -1 call side).
double payoff_dext(const OptionSpec& spec);

// Azema supermartingale of the honest time: (S/X)^alpha (put, alpha<0) or
// (Q/X)^alpha (call, alpha>0); 1 on the other branch. Value in (0, 1].
double azema_supermartingale(const ModelParams& params, const StatePoint& p, Side side);

// Enlarged-filtration drift adjustment of the driving Brownian motion,
//   psi(z, j) = alpha*sigma * z/(1-z)   for j = 1,
//   psi(z, j) = -alpha*sigma            for j = 0,
// with z the Azema ratio. Diverges as z -> 1 when j = 1 (repelling drift).
double drift_adjustment(const ModelParams& params, double z, Regime j, Side side);

// Rate drift of the asset under the enlarged filtration: r - delta + sigma*psi(z,j).
// For j = 0 this equals r - delta_prime.
double asset_drift_rate(const ModelParams& params, double z, Regime j);

// H_{i,k,j}(x, extremum) = payoff_dx * (rate drift) * x - r * payoff.
// Nonnegative H marks states where exercise cannot be optimal.
double h_function(const OptionSpec& spec, const ModelParams& params,
                  const StatePoint& p, Regime j);

struct ExponentPair {
    double hi = 0.0;  // beta1 (resp. gamma1), > 1
    double lo = 0.0;  // beta2 (resp. gamma2), < 0
};

// Roots of (sigma^2/2) t(t-1) + (r - delta_prime) t - r = 0, beta2 < 0 < 1 < beta1.
ExponentPair exponents_beta(const ModelParams& params);
// Same quadratic with delta in place of delta_prime, gamma2 < 0 < 1 < gamma1.
ExponentPair exponents_gamma(const ModelParams& params);

}  // namespace apex
