#pragma once

#include <vector>

namespace heatlab {

// Modified Bessel function of the first kind I_nu(z), nu >= 0, z >= 0.
// Power series up to z = 30, ratio recurrence anchored on the large-argument
// expansion beyond. Relative accuracy ~1e-12 (series) / ~1e-10 (large z).
double bessel_i(double nu, double z);

// e^{-z} I_nu(z); the form every kernel formula actually consumes.
double bessel_i_scaled(double nu, double z);

// Batch of scaled values at one argument. Orders must be nondecreasing;
// orders sharing a fractional part are served by one recurrence sweep.
void bessel_i_scaled_many(const std::vector<double>& orders, double z,
                          std::vector<double>& out);

// Upper bound for e^{-z} I_nu(z), used by series truncation. Combines the
// growth inequality z^nu/(2^nu Gamma(1+nu)) e^z, its Pochhammer refinement,
// and the leading uniform large-order term with a tested safety factor.
double bessel_i_scaled_upper(double nu, double z);

} // namespace heatlab
