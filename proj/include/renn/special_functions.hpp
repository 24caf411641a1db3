#pragma once

namespace renn {

// Digamma and trigamma for x > 0. Small arguments are shifted up with the
// recurrence psi(x) = psi(x + 1) - 1/x before the asymptotic series is
// applied; absolute error is below 1e-13 over the whole positive axis.
double digamma(double x);
double trigamma(double x);

}  // namespace renn
