#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "apex/fundamental.hpp"
#include "apex/model.hpp"

namespace apex {

enum class ExponentFamily { beta, gamma };

// ---------------------------------------------------------------------------
// Monotone piecewise-cubic interpolant (Fritsch-Carlson) on an increasing grid.
// ---------------------------------------------------------------------------
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    bool empty() const { return x_.empty(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }

  private:
    std::vector<double> x_, y_, m_;  // nodes and node slopes
};

// ---------------------------------------------------------------------------
// Tabulated exercise boundary with its degenerate extension and metadata.
// ---------------------------------------------------------------------------
struct BoundarySolverInfo {
    double ode_rel_tol = 0.0;
    double envelope_gap = 0.0;       // sup-norm gap of the last two anchor iterates
    int anchor_count = 0;
    double existence_threshold = 0.0;
    double asymptote = 0.0;          // large-extremum limit (family 1) or ray slope (family 2)
    bool is_ray = false;
    std::string method;
};

struct BoundaryCurve {
    Side side = Side::put;
    Family family = Family::standard;
    Regime regime = Regime::j0;
    double strike = 1.0;
    // Put side: below the threshold a*(s) degenerates (a = s for family 1, a = 0
    // for family 3). Call side: above the threshold b = q (family 1) / +inf (family 3).
    double domain_threshold = 0.0;
    std::vector<double> grid_extremum;
    std::vector<double> grid_boundary;
    MonotoneCubic interp;
    BoundarySolverInfo info;

    // Boundary value with the degenerate extension outside the tabulated range.
    double value(double extremum) const;
    bool covers(double extremum) const;
};

struct GridSpec {
    double lo = 0.0;        // 0 => automatic (threshold-anchored)
    double hi = 0.0;        // 0 => automatic
    int points_per_decade = 512;
    int max_points = 4096;
};

// ---------------------------------------------------------------------------
// Closed forms and scalar equations
// ---------------------------------------------------------------------------

// a*_{1,0} = beta2 L1/(beta2 - 1) (put) or b*_{1,0} = beta1 K1/(beta1 - 1) (call).
// This is the reflection-only (gapless) solution; in the coupled model it is the
// large-extremum asymptote of the regime-0 family-1 boundary.
double boundary_standard_j0(const OptionSpec& spec, const ModelParams& params);

// Root of the power equation (family 2, reflection-only): lambda* in (0,1) for the
// put, nu* in (1,inf) for the call, for either the beta or the gamma exponent pair.
double root_power_equation(const OptionSpec& spec, const ModelParams& params,
                           ExponentFamily expo_family);

// Number of sign changes of the power equation over a fine grid (uniqueness scan).
int power_equation_sign_changes(const OptionSpec& spec, const ModelParams& params,
                                ExponentFamily expo_family, int n_probes = 10000);

// Entrance-coupled ray slope for the regime-0 family-2 insider boundary:
// solves sum_l (1 - beta_l) P_l(lambda) = alpha (e - v(lambda)) where e is the
// regime-1 entrance value per unit extremum. Reduces to root_power_equation if
// the entrance gap is forced to zero.
double insider_ray_root(const OptionSpec& spec, const ModelParams& params);

// ---------------------------------------------------------------------------
// Smooth-fit coefficient machinery for the two-power regime-0 value
//   V(x) = C_1 x^{e1} + C_2 x^{e2}  (exponents beta for the insider, gamma for
//   the uninformed benchmark)
// ---------------------------------------------------------------------------
struct TwoPowerCoefficients {
    double c[2];   // matches instantaneous stopping and smooth fit at the boundary
    double ds[2];  // partial of c_l in the extremum at fixed boundary
    double da[2];  // partial of c_l in the boundary at fixed extremum
};

TwoPowerCoefficients smooth_fit_coefficients(const OptionSpec& spec, const ExponentPair& ep,
                                             double extremum, double boundary);

// Right-hand side of the first-order boundary ODE coming from the diagonal
// condition  sum_l C_l'(s) s^{e_l} = source(s),  source = (alpha/s)(E(s) - V(s,s))
// for the insider problem and 0 for the uninformed benchmark.
using EntranceFn = std::function<double(double)>;  // E(extremum)

double boundary_ode_rhs(const OptionSpec& spec, const ModelParams& params,
                        ExponentFamily expo_family, double extremum, double boundary,
                        const EntranceFn* entrance = nullptr);

// Family-3 reflection-only ODE in the explicit rational form (cross-check of the
// generic coefficient route).
double boundary_ode_rhs_family3_explicit(const OptionSpec& spec, const ModelParams& params,
                                         ExponentFamily expo_family, double extremum,
                                         double boundary);

// ---------------------------------------------------------------------------
// Extremal (maximal put / minimal call) solution of the boundary ODE by the
// receding-anchor envelope with per-anchor bisection.
// ---------------------------------------------------------------------------
struct EnvelopeOptions {
    double ode_rel_tol = 1e-10;
    double ode_abs_tol = 1e-12;
    double converge_tol = 1e-8;  // sup-norm gap between anchor iterates
    int max_anchors = 40;
    int bisect_iters = 60;
};

BoundaryCurve solve_extremal_boundary(const OptionSpec& spec, const ModelParams& params,
                                      ExponentFamily expo_family, const GridSpec& grid,
                                      const EntranceFn* entrance = nullptr,
                                      const EnvelopeOptions& opt = {});

// ---------------------------------------------------------------------------
// Regime-1 boundary: root of the normal-entrance transcendental equation.
// The smooth-fit coefficients on the fundamental pair admit a finite diagonal
// limit only where the divergent-mode coefficient vanishes; the boundary is the
// extremal such root below the Theorem-2.1 caps (above the floors, call side).
// ---------------------------------------------------------------------------
struct BoundaryJ1Result {
    double boundary = 0.0;
    double kappa = 0.0;           // multiplier on the entrance-regular solution
    double entrance_value = 0.0;  // lim_{x->extremum} V_{i,1}(x, extremum)
    double equation_residual = 0.0;
};

BoundaryJ1Result boundary_j1(const OptionSpec& spec, const ModelParams& params,
                             const FundamentalSolutionParams& fsp, double extremum);

// Maximal root of H_{i,.,1}(x, extremum) = 0 (the Theorem-2.1 regime-1 cap/floor).
double h_root_j1(const OptionSpec& spec, const ModelParams& params, double extremum);

// Existence edge of the regime-1 boundary (bisection on the extremum value);
// returns 0 (put) / +inf (call) when no edge is found in the probed range.
double existence_threshold_j1(const OptionSpec& spec, const ModelParams& params,
                              const FundamentalSolutionParams& fsp,
                              double probe_lo, double probe_hi);

// ---------------------------------------------------------------------------
// Uninformed benchmark boundaries (gamma family): g*_1/h*_1 closed form,
// g*_2/h*_2 ray, g*_3/h*_3 extremal ODE solution.
// ---------------------------------------------------------------------------
double appendix_boundary_standard(const OptionSpec& spec, const ModelParams& params);
BoundaryCurve appendix_boundary_curve(const OptionSpec& spec, const ModelParams& params,
                                      const GridSpec& grid);

// Theorem-2.1 ordering report for a computed boundary value.
struct OrderingCheck {
    double cap_h = 0.0;        // abar_{i,j} (put) / bbar floor (call); NaN if vacuous
    double cap_appendix = 0.0; // g*_i / h*_i
    bool within_h_cap = true;
    bool within_appendix_cap = true;  // the paper's a* < g* claim; can fail (flagged)
};

// appendix_value: precomputed g*_i(s)/h*_i(q) where the caller has it (family 3);
// families 1-2 are computed internally when NaN is passed.
OrderingCheck check_theorem21_ordering(const OptionSpec& spec, const ModelParams& params,
                                       Regime j, double extremum, double boundary,
                                       double appendix_value
                                           = std::numeric_limits<double>::quiet_NaN());

}  // namespace apex
