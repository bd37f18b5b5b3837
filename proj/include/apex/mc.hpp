#pragma once

#include <cstdint>
#include <vector>

#include "apex/boundary.hpp"
#include "apex/model.hpp"

namespace apex {

struct SimConfig {
    double horizon = 50.0;      // years
    double dt = 1e-3;           // years
    std::int64_t n_paths = 200000;
    std::uint64_t seed = 1;
    bool antithetic = false;
    int threads = 0;            // 0 = hardware concurrency; result is thread-count invariant
    // Sample the per-step extremum from the exact Brownian-bridge law instead of
    // inspecting grid points only. Removes the O(sqrt(dt)) understatement of the
    // running extremum that otherwise biases the lookback payoffs.
    bool bridge_extrema = true;

    void validate() const;
    std::int64_t n_steps() const { return static_cast<std::int64_t>(horizon / dt + 0.5); }
};

// Full-path storage for diagnostic runs (moment checks, small-n cross-validation).
struct PathEnsemble {
    Side side = Side::put;
    double x0 = 0.0;
    double extremum0 = 0.0;
    double dt = 0.0;
    std::vector<std::vector<double>> log_x;        // per path, indices 0..n_steps
    std::vector<std::vector<double>> log_extremum; // running extremum (seed included)
    std::vector<std::int64_t> honest_index;        // last grid index attaining the extremum
    std::uint64_t ensemble_hash = 0;               // order-sensitive digest for determinism tests
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
    double bias_note = 0.0;   // e^{-r horizon} * payoff bound over the reachable set
    Regime regime = Regime::j0;
    double capped_fraction = 0.0;  // conditioned-SDE drift-cap activations per step
};

// Per-path substream seed (splitmix64 mix of the master seed and path index).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t path_index);

// Exact-increment reference-measure simulation; tracks the seeded running
// extremum and the pathwise honest-time index.
PathEnsemble simulate_reference(const ModelParams& params, double x0, double extremum0,
                                const SimConfig& cfg, Side side);

// Insider-rule evaluation on a stored ensemble: per path the regime switches at
// the honest index and the rule stops at the regime's boundary.
MCEstimate evaluate_insider_rule(const PathEnsemble& ensemble, const OptionSpec& spec,
                                 const BoundaryCurve& boundary_j0,
                                 const BoundaryCurve& boundary_j1,
                                 const ModelParams& params);

// Euler-Maruyama on log X with the regime-1 drift and frozen extremum;
// diagnostic-mode storage.
PathEnsemble simulate_conditioned_j1(const ModelParams& params, double x0,
                                     double extremum_frozen, const SimConfig& cfg,
                                     Side side);

struct EstimateOptions {
    double perturb_j0 = 1.0;  // multiplies the regime-0 boundary (common-random-number studies)
    double perturb_j1 = 1.0;
};

// Streaming estimator (no path storage across paths): routes j=0 to the
// reference-measure pathwise rule and j=1 to the conditioned SDE.
MCEstimate estimate_value(const OptionSpec& spec, const ModelParams& params,
                          double x0, double extremum0, Regime j, const SimConfig& cfg,
                          const BoundaryCurve& boundary_j0, const BoundaryCurve& boundary_j1,
                          const EstimateOptions& opt = {});

}  // namespace apex
