#pragma once

namespace ampi {

/// Scaled complementary error function exp(x^2) * erfc(x).
///
/// Stays finite for all x >= -26.6; beyond that the true value overflows
/// double range and +inf is returned. Relative error <= 1e-12 on x >= 0.
double erfcx(double x);

}  // namespace ampi
