#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "apex/errors.hpp"

namespace apex {

struct BracketScan {
    std::vector<std::pair<double, double>> brackets;  // (lo, hi) with a sign change
    int sign_changes = 0;
};

// Scan f on a log-spaced grid over [lo, hi] and collect sign-change brackets.
BracketScan scan_sign_changes(const std::function<double(double)>& f,
                              double lo, double hi, int n_probes);

// Brent's method on a sign-change bracket. Tolerances are absolute + relative.
double brent(const std::function<double(double)>& f, double a, double b,
             double xtol = 1e-14, double rtol = 4.0 * 1e-16, int max_iter = 200);

// Convenience: maximal (or minimal) root of f over [lo, hi] from a log-spaced scan.
// Throws NoRootError when the scan finds no sign change.
double extreme_root(const std::function<double(double)>& f, double lo, double hi,
                    bool maximal, int n_probes = 2000);

}  // namespace apex
