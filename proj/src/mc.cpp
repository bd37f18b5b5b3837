#include "apex/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <random>
#include <thread>

namespace apex {

namespace {

constexpr std::int64_t kBlock = 4096;          // fixed reduction block, thread-count invariant
constexpr std::int64_t kEnsembleCapEntries = 40'000'000;

struct PathRng {
    std::mt19937_64 eng;
    double cached = 0.0;
    bool have_cached = false;

    explicit PathRng(std::uint64_t seed) : eng(seed) {}

    double uniform01() {
        // 53-bit uniform in (0, 1]
        return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
    }
    double normal() {
        if (have_cached) {
            have_cached = false;
            return cached;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925287 * u2;
        cached = r * std::sin(th);
        have_cached = true;
        return r * std::cos(th);
    }
};

struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    double get() const { return sum + c; }
};

struct BlockStats {
    Kahan pay, pay2;
    std::int64_t n_counted = 0;   // paths entering the estimate (conditioning)
    double max_ext_alive = 0.0;   // extremum bound among paths alive at the horizon
    std::int64_t capped = 0;      // conditioned-drift cap activations
    std::int64_t steps = 0;
};

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename PerBlock>
std::vector<BlockStats> run_blocks(std::int64_t n_paths, int threads, PerBlock&& body) {
    const std::int64_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<BlockStats> stats(static_cast<std::size_t>(n_blocks));
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const std::int64_t lo = b * kBlock;
            const std::int64_t hi = std::min(n_paths, lo + kBlock);
            body(stats[static_cast<std::size_t>(b)], lo, hi);
        }
    };
    const int nt = static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), n_blocks));
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nt));
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return stats;
}

MCEstimate reduce_blocks(const std::vector<BlockStats>& stats, double r, double horizon,
                         Regime regime) {
    Kahan sum, sum2;
    std::int64_t n = 0, capped = 0, steps = 0;
    double max_ext = 0.0;
    for (const auto& b : stats) {  // fixed block order => deterministic reduction
        sum.add(b.pay.get());
        sum2.add(b.pay2.get());
        n += b.n_counted;
        capped += b.capped;
        steps += b.steps;
        max_ext = std::max(max_ext, b.max_ext_alive);
    }
    MCEstimate e;
    e.regime = regime;
    e.n = n;
    if (n > 1) {
        e.mean = sum.get() / static_cast<double>(n);
        const double var =
            std::max(0.0, (sum2.get() - n * e.mean * e.mean) / static_cast<double>(n - 1));
        e.std_error = std::sqrt(var / static_cast<double>(n));
    }
    e.bias_note = std::exp(-r * horizon) * std::max(1.0, max_ext);
    e.capped_fraction = steps > 0 ? static_cast<double>(capped) / static_cast<double>(steps) : 0.0;
    return e;
}

std::uint64_t hash_double(std::uint64_t h, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    return mix64(h ^ bits);
}

// One reference-measure path in log space with its running extremum and the
// honest-time index. With bridge_extrema the per-step extremum is drawn from the
// exact Brownian-bridge law, so the running extremum has no grid bias; otherwise
// only grid points are inspected (recomputable from the samples).
struct PathWorkspace {
    std::vector<double> lx;    // grid log prices, 0..n
    std::vector<double> lext;  // running extremum at grid times (seed included)
    std::int64_t theta = 0;    // last grid index attaining the global extremum
    double global_ext = 0.0;   // log of the extremum attained at theta
};

void generate_reference_path(const ModelParams& params, const SimConfig& cfg, Side side,
                             double lx0, double lext0, std::int64_t path_index,
                             PathWorkspace& w) {
    const std::int64_t nst = cfg.n_steps();
    w.lx.resize(static_cast<std::size_t>(nst) + 1);
    w.lext.resize(static_cast<std::size_t>(nst) + 1);
    const double c = (params.r - params.delta - 0.5 * params.sigma2()) * cfg.dt;
    const double sdt = params.sigma * std::sqrt(cfg.dt);
    const double two_s2dt = 2.0 * params.sigma2() * cfg.dt;
    const std::uint64_t stream =
        cfg.antithetic ? static_cast<std::uint64_t>(path_index / 2)
                       : static_cast<std::uint64_t>(path_index);
    const double sign = (cfg.antithetic && (path_index & 1)) ? -1.0 : 1.0;
    PathRng rng(substream_seed(cfg.seed, stream));
    const bool put = side == Side::put;
    w.lx[0] = lx0;
    w.lext[0] = lext0;
    w.global_ext = lext0;
    w.theta = 0;
    for (std::int64_t k = 1; k <= nst; ++k) {
        const double prev = w.lx[static_cast<std::size_t>(k - 1)];
        const double cur = prev + c + sdt * sign * rng.normal();
        w.lx[static_cast<std::size_t>(k)] = cur;
        double step_ext;
        if (cfg.bridge_extrema) {
            const double u = rng.uniform01();
            const double span = cur - prev;
            const double root = std::sqrt(span * span - two_s2dt * std::log(u));
            step_ext = put ? 0.5 * (prev + cur + root) : 0.5 * (prev + cur - root);
        } else {
            step_ext = cur;
        }
        const double before = w.lext[static_cast<std::size_t>(k - 1)];
        w.lext[static_cast<std::size_t>(k)] =
            put ? std::max(before, step_ext) : std::min(before, step_ext);
        const bool attains = put ? step_ext >= w.global_ext : step_ext <= w.global_ext;
        if (attains) {
            w.global_ext = step_ext;
            w.theta = k;
        }
    }
}

struct RulePayoff {
    double discounted = 0.0;
    bool stopped = false;
    double ext_at_end = 0.0;
};

RulePayoff run_insider_rule(const PathWorkspace& w, const OptionSpec& spec,
                            const ModelParams& params, const BoundaryCurve& b0,
                            const BoundaryCurve& b1, double dt, double perturb0,
                            double perturb1) {
    const bool put = spec.side == Side::put;
    const double frozen_ext = std::exp(w.global_ext);
    RulePayoff out;
    for (std::size_t k = 0; k < w.lx.size(); ++k) {
        const bool announced = static_cast<std::int64_t>(k) >= w.theta;
        const double ext = announced ? frozen_ext : std::exp(w.lext[k]);
        const double bnd = announced ? b1.value(ext) * perturb1 : b0.value(ext) * perturb0;
        const double x = std::exp(w.lx[k]);
        if (put ? x <= bnd : x >= bnd) {
            const double tau = static_cast<double>(k) * dt;
            out.discounted = std::exp(-params.r * tau)
                             * payoff(spec, StatePoint{put ? std::min(x, ext) : std::max(x, ext),
                                                       ext});
            out.stopped = true;
            out.ext_at_end = ext;
            return out;
        }
    }
    out.ext_at_end = std::exp(w.lext.back());
    return out;
}

}  // namespace

void SimConfig::validate() const {
    if (!(horizon > 0.0)) throw ConfigError("SimConfig: horizon must be positive");
    if (!(dt > 0.0) || !(dt < horizon)) throw ConfigError("SimConfig: need 0 < dt < horizon");
    if (n_paths < 100) throw ConfigError("SimConfig: n_paths must be at least 100");
    if (antithetic && n_paths % 2 != 0)
        throw ConfigError("SimConfig: antithetic sampling needs an even path count");
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t path_index) {
    return mix64(seed ^ mix64(path_index + 1));
}

PathEnsemble simulate_reference(const ModelParams& params, double x0, double extremum0,
                                const SimConfig& cfg, Side side) {
    cfg.validate();
    check_wedge(StatePoint{x0, extremum0}, side);
    const std::int64_t nst = cfg.n_steps();
    if (cfg.n_paths * (nst + 1) > kEnsembleCapEntries) {
        throw ConfigError("simulate_reference: ensemble too large to store; "
                          "use estimate_value (streaming)");
    }
    PathEnsemble e;
    e.side = side;
    e.x0 = x0;
    e.extremum0 = extremum0;
    e.dt = cfg.dt;
    e.log_x.resize(static_cast<std::size_t>(cfg.n_paths));
    e.log_extremum.resize(static_cast<std::size_t>(cfg.n_paths));
    e.honest_index.resize(static_cast<std::size_t>(cfg.n_paths));
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    PathWorkspace w;
    for (std::int64_t i = 0; i < cfg.n_paths; ++i) {
        generate_reference_path(params, cfg, side, std::log(x0), std::log(extremum0), i, w);
        e.log_x[static_cast<std::size_t>(i)] = w.lx;
        e.log_extremum[static_cast<std::size_t>(i)] = w.lext;
        e.honest_index[static_cast<std::size_t>(i)] = w.theta;
        for (double v : w.lx) h = hash_double(h, v);
        for (double v : w.lext) h = hash_double(h, v);
    }
    e.ensemble_hash = h;
    return e;
}

MCEstimate evaluate_insider_rule(const PathEnsemble& ensemble, const OptionSpec& spec,
                                 const BoundaryCurve& boundary_j0,
                                 const BoundaryCurve& boundary_j1,
                                 const ModelParams& params) {
    if (spec.side != ensemble.side)
        throw CoverageError("evaluate_insider_rule: ensemble side mismatch");
    if (boundary_j0.regime != Regime::j0 || boundary_j1.regime != Regime::j1)
        throw CoverageError("evaluate_insider_rule: curves must be regimes 0 and 1");
    Kahan sum, sum2;
    std::int64_t n = 0;
    double max_ext_alive = 0.0;
    PathWorkspace w;
    for (std::size_t i = 0; i < ensemble.log_x.size(); ++i) {
        w.lx = ensemble.log_x[i];
        w.lext = ensemble.log_extremum[i];
        w.theta = ensemble.honest_index[i];
        w.global_ext = w.lext[static_cast<std::size_t>(w.theta)];
        const auto rp = run_insider_rule(w, spec, params, boundary_j0, boundary_j1,
                                         ensemble.dt, 1.0, 1.0);
        sum.add(rp.discounted);
        sum2.add(rp.discounted * rp.discounted);
        if (!rp.stopped) max_ext_alive = std::max(max_ext_alive, rp.ext_at_end);
        ++n;
    }
    MCEstimate e;
    e.regime = Regime::j0;
    e.n = n;
    e.mean = sum.get() / static_cast<double>(n);
    const double var =
        std::max(0.0, (sum2.get() - n * e.mean * e.mean) / static_cast<double>(n - 1));
    e.std_error = std::sqrt(var / static_cast<double>(n));
    const double horizon = ensemble.dt * static_cast<double>(ensemble.log_x.front().size() - 1);
    e.bias_note = std::exp(-params.r * horizon) * std::max(1.0, max_ext_alive);
    return e;
}

PathEnsemble simulate_conditioned_j1(const ModelParams& params, double x0,
                                     double extremum_frozen, const SimConfig& cfg,
                                     Side side) {
    cfg.validate();
    check_wedge(StatePoint{x0, extremum_frozen}, side);
    if (x0 == extremum_frozen)
        throw DomainError("simulate_conditioned_j1: start strictly inside the wedge");
    const std::int64_t nst = cfg.n_steps();
    if (cfg.n_paths * (nst + 1) > kEnsembleCapEntries) {
        throw ConfigError("simulate_conditioned_j1: ensemble too large to store");
    }
    PathEnsemble e;
    e.side = side;
    e.x0 = x0;
    e.extremum0 = extremum_frozen;
    e.dt = cfg.dt;
    e.log_x.resize(static_cast<std::size_t>(cfg.n_paths));
    e.log_extremum.resize(static_cast<std::size_t>(cfg.n_paths));
    e.honest_index.assign(static_cast<std::size_t>(cfg.n_paths), 0);
    const bool put = side == Side::put;
    const double lext = std::log(extremum_frozen);
    const double cap = 1000.0 * params.sigma;
    std::int64_t capped = 0, steps = 0;
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::int64_t i = 0; i < cfg.n_paths; ++i) {
        auto& lx = e.log_x[static_cast<std::size_t>(i)];
        lx.resize(static_cast<std::size_t>(nst) + 1);
        const std::uint64_t stream =
            cfg.antithetic ? static_cast<std::uint64_t>(i / 2) : static_cast<std::uint64_t>(i);
        const double sign = (cfg.antithetic && (i & 1)) ? -1.0 : 1.0;
        PathRng rng(substream_seed(cfg.seed, stream));
        lx[0] = std::log(x0);
        const double sq = params.sigma * std::sqrt(cfg.dt);
        for (std::int64_t k = 1; k <= nst; ++k) {
            const double prev = lx[static_cast<std::size_t>(k - 1)];
            const double z = std::exp(params.alpha * (lext - prev));
            double psi = params.sigma2() * params.alpha * z / (1.0 - z);
            if (std::abs(psi) > cap) {
                psi = std::copysign(cap, psi);
                ++capped;
            }
            double cur = prev + (params.r - params.delta + psi - 0.5 * params.sigma2()) * cfg.dt
                         + sq * sign * rng.normal();
            if (put ? cur >= lext : cur <= lext) {  // discretization overshoot of the diagonal
                cur = put ? lext - 1e-10 : lext + 1e-10;
                ++capped;
            }
            lx[static_cast<std::size_t>(k)] = cur;
            ++steps;
        }
        e.log_extremum[static_cast<std::size_t>(i)].assign(lx.size(), lext);
        for (double v : lx) h = hash_double(h, v);
    }
    if (steps > 0 && static_cast<double>(capped) / static_cast<double>(steps) > 1e-3) {
        throw StepError("simulate_conditioned_j1: drift cap active on more than 0.1% of steps; "
                        "decrease dt");
    }
    e.ensemble_hash = h;
    return e;
}

MCEstimate estimate_value(const OptionSpec& spec, const ModelParams& params,
                          double x0, double extremum0, Regime j, const SimConfig& cfg,
                          const BoundaryCurve& boundary_j0, const BoundaryCurve& boundary_j1,
                          const EstimateOptions& opt) {
    cfg.validate();
    check_wedge(StatePoint{x0, extremum0}, spec.side);
    const bool put = spec.side == Side::put;
    const std::int64_t nst = cfg.n_steps();
    const double lx0 = std::log(x0);
    const double lext0 = std::log(extremum0);
    const bool off_diagonal = x0 != extremum0;

    std::vector<BlockStats> stats;
    if (j == Regime::j0) {
        stats = run_blocks(cfg.n_paths, cfg.threads, [&](BlockStats& bs, std::int64_t lo,
                                                         std::int64_t hi) {
            PathWorkspace w;
            for (std::int64_t i = lo; i < hi; ++i) {
                generate_reference_path(params, cfg, spec.side, lx0, lext0, i, w);
                if (off_diagonal && w.theta == 0) {
                    // regime 0 requested strictly inside the wedge: condition on the
                    // seeded extremum being beaten (theta > 0)
                    continue;
                }
                const auto rp = run_insider_rule(w, spec, params, boundary_j0, boundary_j1,
                                                 cfg.dt, opt.perturb_j0, opt.perturb_j1);
                bs.pay.add(rp.discounted);
                bs.pay2.add(rp.discounted * rp.discounted);
                if (!rp.stopped) bs.max_ext_alive = std::max(bs.max_ext_alive, rp.ext_at_end);
                ++bs.n_counted;
            }
        });
    } else {
        const double lext = lext0;
        const double cap = 1000.0 * params.sigma;
        stats = run_blocks(cfg.n_paths, cfg.threads, [&](BlockStats& bs, std::int64_t lo,
                                                         std::int64_t hi) {
            for (std::int64_t i = lo; i < hi; ++i) {
                const std::uint64_t stream = cfg.antithetic
                                                 ? static_cast<std::uint64_t>(i / 2)
                                                 : static_cast<std::uint64_t>(i);
                const double sign = (cfg.antithetic && (i & 1)) ? -1.0 : 1.0;
                PathRng rng(substream_seed(cfg.seed, stream));
                double l = lx0;
                const double sq = params.sigma * std::sqrt(cfg.dt);
                double pay = 0.0;
                bool stopped = false;
                const double bnd = boundary_j1.value(extremum0) * opt.perturb_j1;
                if (put ? x0 <= bnd : x0 >= bnd) {  // immediate exercise at t = 0
                    pay = payoff(spec, StatePoint{x0, extremum0});
                    stopped = true;
                }
                for (std::int64_t k = 1; k <= nst && !stopped; ++k) {
                    const double z = std::exp(params.alpha * (lext - l));
                    double psi = params.sigma2() * params.alpha * z / (1.0 - z);
                    if (std::abs(psi) > cap) {
                        psi = std::copysign(cap, psi);
                        ++bs.capped;
                    }
                    l += (params.r - params.delta + psi - 0.5 * params.sigma2()) * cfg.dt
                         + sq * sign * rng.normal();
                    ++bs.steps;
                    if (put ? l >= lext : l <= lext) {  // overshoot of the unattainable diagonal
                        l = put ? lext - 1e-10 : lext + 1e-10;
                        ++bs.capped;
                    }
                    const double x = std::exp(l);
                    if (put ? x <= bnd : x >= bnd) {
                        const double tau = static_cast<double>(k) * cfg.dt;
                        pay = std::exp(-params.r * tau)
                              * payoff(spec, StatePoint{put ? std::min(x, extremum0)
                                                            : std::max(x, extremum0),
                                                        extremum0});
                        stopped = true;
                    }
                }
                bs.pay.add(pay);
                bs.pay2.add(pay * pay);
                if (!stopped) bs.max_ext_alive = std::max(bs.max_ext_alive, extremum0);
                ++bs.n_counted;
            }
        });
    }
    auto est = reduce_blocks(stats, params.r, cfg.horizon, j);
    if (j == Regime::j1 && est.capped_fraction > 1e-3) {
        throw StepError("estimate_value: drift cap active on more than 0.1% of steps; decrease dt");
    }
    return est;
}

}  // namespace apex
