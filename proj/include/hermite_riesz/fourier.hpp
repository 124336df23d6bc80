#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hermite_riesz {

/// g^(t) = int g(x) e^{-itx} dx approximated from samples g(x0 + j*spacing),
/// at angular frequencies t_j = 2 pi j / (N spacing), j = 0..N/2.
struct Spectrum
{
  std::vector<double> t;
  std::vector<std::complex<double>> value;
  double resolution = 0.0;  // spacing between consecutive t
};

Spectrum sampled_fourier_transform(std::span<const double> samples, double x0, double spacing);

/// Smallest r with |g^(t)| <= threshold * peak for all sampled |t| > r.
/// Rejects samples whose window edges have not decayed below threshold * max|g|.
double numerical_fourier_support(std::span<const double> samples, double spacing, double threshold);

/// max_{|t| > r + 2 resolution} |g^(t)| / peak, same edge precondition as above.
double fourier_leakage(std::span<const double> samples, double spacing, double r, double edge_threshold = 1e-6);

}  // namespace hermite_riesz
