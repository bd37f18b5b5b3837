#pragma once

#include "apex/errors.hpp"

namespace apex {

// Gauss hypergeometric F(a, b; c; z) for real parameters and z in [0, 1).
//
// Direct series for z <= 0.5; for z > 0.5 the linear z -> 1-z connection
// formula is applied when c-a-b is not (near) an integer, otherwise a
// ConvergenceError is thrown so the caller can fall back to the ODE backend.
double hyp2f1(double a, double b, double c, double z);

// Series-only evaluation with compensated (Neumaier) accumulation; the
// independent oracle used by the tests. Valid for z in [0, 1); slow near 1.
double hyp2f1_series_ref(double a, double b, double c, double z, int max_terms = 200000);

// d/dz F(a, b; c; z) = (a b / c) F(a+1, b+1; c+1; z).
double hyp2f1_dz(double a, double b, double c, double z);

}  // namespace apex
