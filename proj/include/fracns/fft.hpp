#pragma once

#include "fracns/field.hpp"

namespace fracns {

// Forward transform, coefficients scaled by h^3 so that the zero mode of a
// constant field c equals c*L^3.
SpectralField fourier_forward(const ScalarField& field);
ScalarField fourier_inverse(const SpectralField& spec);

// In-place unnormalized c2c transforms (plan cache behind a mutex).
void dft3(std::vector<std::complex<double>>& data, int n, int sign);

}  // namespace fracns
