#pragma once

#include <array>
#include <cstddef>

#include <boost/math/quadrature/gauss.hpp>

namespace hermite_riesz::detail {

/// Full symmetric Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct Legendre
{
  std::array<double, N> x{};
  std::array<double, N> w{};

  Legendre()
  {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        x[j] = 0.0;
        w[j++] = wt[i];
      } else {
        x[j] = a[i];
        w[j++] = wt[i];
        x[j] = -a[i];
        w[j++] = wt[i];
      }
    }
  }

  static const Legendre& get()
  {
    static const Legendre rule;
    return rule;
  }

  template <class F>
  double integrate(double a, double b, F&& f) const
  {
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += w[i] * f(c + h * x[i]);
    return h * s;
  }
};

}  // namespace hermite_riesz::detail
