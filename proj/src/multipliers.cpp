#include <cmath>
#include <numbers>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/output.hpp"
#include "hermite_riesz/spectral_core.hpp"

namespace hermite_riesz {

MultiplierSpec bochner_riesz_spec(double R, double delta)
{
  if (!(R > 0)) throw ConfigError("bochner_riesz_spec: R must be > 0");
  if (!(delta >= 0)) throw ConfigError("bochner_riesz_spec: delta must be >= 0");
  MultiplierSpec s;
  s.name = "bochner_riesz(R=" + io::format_double(R) + ",delta=" + io::format_double(delta) + ")";
  s.eval = [R, delta](double lambda) {
    double u = 1.0 - (lambda / R) * (lambda / R);
    if (u <= 0) return 0.0;
    return delta == 0 ? 1.0 : std::pow(u, delta);
  };
  return s;
}

MultiplierSpec heat_multiplier(double t)
{
  if (!(t > 0)) throw ConfigError("heat_multiplier: t must be > 0");
  MultiplierSpec s;
  s.name = "heat(t=" + io::format_double(t) + ")";
  s.eval = [t](double lambda) { return std::exp(-t * lambda * lambda); };
  return s;
}

MultiplierSpec resolvent_multiplier(double gamma)
{
  MultiplierSpec s;
  s.name = "resolvent(gamma=" + io::format_double(gamma) + ")";
  s.eval = [gamma](double lambda) { return std::pow(1.0 + lambda * lambda, -gamma / 2.0); };
  if (gamma > 0) s.envelope = Envelope{1.0, gamma};
  return s;
}

MultiplierSpec shell_selector(int k, int dim)
{
  MultiplierSpec s;
  s.name = "shell(" + std::to_string(k) + ")";
  double target = 2.0 * k + dim;
  s.eval = [target](double lambda) { return std::abs(lambda * lambda - target) < 0.5 ? 1.0 : 0.0; };
  return s;
}

MultiplierSpec constant_multiplier(double value)
{
  MultiplierSpec s;
  s.name = "const(" + io::format_double(value) + ")";
  s.eval = [value](double) { return value; };
  return s;
}

CriticalIndex critical_index(int n, double p)
{
  if (!(p > 0)) throw ConfigError("critical_index: p must be > 0");
  if (n < 1) throw ConfigError("critical_index: n must be >= 1");
  double gamma = n * (1.0 / p - 0.5);
  CriticalIndex ci;
  ci.gamma = gamma;
  ci.delta = gamma - 0.5;
  double pmax = 2.0 * n / (n + 2.0);
  ci.in_range = p >= 1.0 - 1e-12 && p <= pmax + 1e-12;
  return ci;
}

namespace {

void check_points(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.empty()) throw ConfigError("kernel: points of different dimension");
}

}  // namespace

double mehler_heat_kernel(double t, std::span<const double> x, std::span<const double> y)
{
  if (!(t > 0)) throw ConfigError("mehler_heat_kernel: t must be > 0");
  check_points(x, y);
  double n = static_cast<double>(x.size());
  double xx = 0, yy = 0, xy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    yy += y[i] * y[i];
    xy += x[i] * y[i];
  }
  double s = 2.0 * t;
  // log sinh(s) without overflow
  double log_sinh = s + std::log1p(-std::exp(-2.0 * s)) - std::numbers::ln2;
  double coth = 1.0 / std::tanh(s);
  double inv_sinh = std::exp(-log_sinh);
  double logk = -0.5 * n * (std::log(2.0 * std::numbers::pi) + log_sinh) - 0.5 * coth * (xx + yy) + xy * inv_sinh;
  return std::exp(logk);
}

double euclidean_heat_kernel(double t, std::span<const double> x, std::span<const double> y)
{
  if (!(t > 0)) throw ConfigError("euclidean_heat_kernel: t must be > 0");
  check_points(x, y);
  double d2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  double n = static_cast<double>(x.size());
  return std::pow(4.0 * std::numbers::pi * t, -n / 2.0) * std::exp(-d2 / (4.0 * t));
}

}  // namespace hermite_riesz
