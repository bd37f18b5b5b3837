#pragma once

#include <optional>

#include "apex/boundary.hpp"
#include "apex/fundamental.hpp"
#include "apex/model.hpp"

namespace apex {

enum class RegionTag { continuation, stopping, degenerate_never_stop };

struct ValueResult {
    double value = 0.0;
    RegionTag region = RegionTag::continuation;
    Regime regime = Regime::j0;
    std::optional<double> gradient_x;
};

struct CoefficientPair {
    double c1 = 0.0;  // multiplies x^{beta1} (or W_{.,1})
    double c2 = 0.0;  // multiplies x^{beta2} (or W_{.,2})
};

// Smooth-fit coefficient pair of the regime-0 two-power value at a given boundary.
CoefficientPair coefficients_j0(const OptionSpec& spec, const ModelParams& params,
                                double boundary, double extremum);

// Bundle of everything needed to price one contract: boundaries for both regimes,
// the uninformed benchmark, and the regime-1 entrance data.
class PricingModel {
  public:
    static PricingModel build(const OptionSpec& spec, const ModelParams& params,
                              const GridSpec& grid = {});

    const OptionSpec& spec() const { return spec_; }
    const ModelParams& params() const { return params_; }
    const FundamentalSolutionParams& fundamental() const { return fsp_; }
    const BoundaryCurve& boundary(Regime j) const {
        return j == Regime::j0 ? j0_ : j1_;
    }
    const BoundaryCurve& appendix_boundary() const { return appendix_; }

    // Regime-1 entrance (diagonal) value E_i(extremum) = lim_{x->ext} V_{i,1}.
    double entrance_value(double extremum) const;

    ValueResult value(const StatePoint& p, Regime j) const;
    double value_dx(const StatePoint& p, Regime j) const;
    double value_dxx(const StatePoint& p, Regime j) const;
    RegionTag classify_region(const StatePoint& p, Regime j) const;

    // (L V - r V) at an interior point, using the regime-appropriate drift.
    double pde_residual(const StatePoint& p, Regime j) const;

    // d/d extremum V_{i,0}(x, s)|_{x=s-} - (V_{i,1}(s,s) - V_{i,0}(s,s)) alpha/s,
    // i.e. the normal-reflection condition with the regime-gap term.
    double normal_reflection_residual(double extremum) const;

    // Uninformed benchmark value (gamma exponents, reflection only).
    ValueResult value_appendix(const StatePoint& p) const;
    double value_appendix_dx(const StatePoint& p) const;

  private:
    OptionSpec spec_;
    ModelParams params_;
    FundamentalSolutionParams fsp_;
    BoundaryCurve j0_, j1_, appendix_;
    double fam2_entrance_slope_ = 0.0;   // E_2(s)/s for family 2
    double subthreshold_coef_ = 0.0;     // family-3 continuation coefficient at the threshold
    double appendix_subthr_coef_ = 0.0;  // same for the uninformed benchmark

    double j1_kappa(double extremum, double* boundary_out = nullptr) const;
};

// Convenience: entrance-value function for the regime-0 boundary ODE source.
EntranceFn make_entrance_fn(const OptionSpec& spec, const ModelParams& params,
                            const FundamentalSolutionParams& fsp);

}  // namespace apex
