#include "hermite_riesz/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/output.hpp"

namespace hermite_riesz {

Spectrum sampled_fourier_transform(std::span<const double> samples, double x0, double spacing)
{
  int n = static_cast<int>(samples.size());
  if (n < 4) throw ConfigError("fourier transform: need at least 4 samples");
  if (!(spacing > 0)) throw ConfigError("fourier transform: spacing must be > 0");
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  std::copy(samples.begin(), samples.end(), in);
  fftw_execute(plan);
  Spectrum s;
  s.resolution = 2.0 * std::numbers::pi / (n * spacing);
  s.t.resize(n / 2 + 1);
  s.value.resize(n / 2 + 1);
  for (int j = 0; j <= n / 2; ++j) {
    double t = j * s.resolution;
    std::complex<double> v(out[j][0], out[j][1]);
    s.t[j] = t;
    s.value[j] = spacing * std::polar(1.0, -t * x0) * v;
  }
  fftw_destroy_plan(plan);
  fftw_free(in);
  fftw_free(out);
  return s;
}

namespace {

void check_edges(std::span<const double> samples, double threshold)
{
  double mx = 0;
  for (double v : samples) mx = std::max(mx, std::abs(v));
  double edge = std::max(std::abs(samples.front()), std::abs(samples.back()));
  if (edge > threshold * mx)
    throw NumericalError("fourier support: samples have not decayed at the window edge (edge/max = " +
                         io::format_double(edge / mx) + "), aliasing risk");
}

}  // namespace

double numerical_fourier_support(std::span<const double> samples, double spacing, double threshold)
{
  check_edges(samples, threshold);
  auto s = sampled_fourier_transform(samples, 0.0, spacing);
  double peak = 0;
  for (auto& v : s.value) peak = std::max(peak, std::abs(v));
  double r = 0;
  for (std::size_t j = 0; j < s.t.size(); ++j)
    if (std::abs(s.value[j]) > threshold * peak) r = s.t[j];
  return r;
}

double fourier_leakage(std::span<const double> samples, double spacing, double r, double edge_threshold)
{
  check_edges(samples, edge_threshold);
  auto s = sampled_fourier_transform(samples, 0.0, spacing);
  double peak = 0, out = 0;
  double cut = r + 2.0 * s.resolution;
  for (std::size_t j = 0; j < s.t.size(); ++j) {
    double a = std::abs(s.value[j]);
    peak = std::max(peak, a);
    if (s.t[j] > cut) out = std::max(out, a);
  }
  return peak > 0 ? out / peak : 0.0;
}

}  // namespace hermite_riesz
