#include <cmath>

#include "hermite_riesz/analysis.hpp"
#include "hermite_riesz/error.hpp"

namespace hermite_riesz {

ProofTraceReport proof_trace(const GridFunction& f, double alpha, double R, double p)
{
  if (!(R > 0)) throw ConfigError("proof_trace: R must be > 0");
  const TensorGrid& grid = *f.grid;
  int n = grid.dim;
  ProofTraceReport rep;
  rep.alpha = alpha;
  rep.R = R;
  rep.p = p;
  rep.n = n;
  rep.delta = std::max(0.0, critical_index(n, p).delta);

  auto cz = cz_decompose(f, alpha, p);
  rep.warnings = cz.warnings;
  rep.parts = cz.parts.size();
  std::vector<double> h1(f.values.size(), 0.0), h2(f.values.size(), 0.0);
  for (const auto& [k, idx] : partition_by_radius(cz, R))
    for (std::size_t j : idx) {
      auto& target = k <= 0 ? h1 : h2;
      (k <= 0 ? rep.parts_small : rep.parts_large)++;
      const auto& part = cz.parts[j];
      for (std::size_t i = 0; i < part.cells.size(); ++i) target[part.cells[i]] = part.values[i];
    }

  auto w = grid.measures();
  for (std::size_t i = 0; i < w.size(); ++i) {
    rep.f_pp += std::pow(std::abs(f.values[i]), p) * w[i];
    rep.g_l2_sq += cz.g.values[i] * cz.g.values[i] * w[i];
  }
  rep.budget = std::pow(alpha, -p) * rep.f_pp;

  // S_R kills every shell with 2k + n >= R^2
  int live = static_cast<int>(std::ceil((R * R - n) / 2.0)) - 1;
  while (live >= 0 && 2.0 * live + n >= R * R) --live;
  while (2.0 * (live + 1) + n < R * R) ++live;
  auto S = bochner_riesz_spec(R, rep.delta);
  auto apply_S = [&](const std::vector<double>& v) {
    if (live < 0) return std::vector<double>(v.size(), 0.0);
    GridFunction in(f.grid, v);
    return synthesize(apply_multiplier(S, analyze(in, live)), f.grid).values;
  };
  auto omega = ball_cover_counts(cz, 4.0);
  auto level = [&](const std::vector<double>& v, bool outside_omega) {
    double m = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) > alpha && (!outside_omega || omega[i] == 0)) m += w[i];
    return m;
  };
  rep.level_g = level(apply_S(cz.g.values), false);
  rep.level_h1 = level(apply_S(h1), false);
  rep.level_h2_outside = level(apply_S(h2), true);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (omega[i] > 0) rep.omega_star += w[i];

  if (rep.budget > 0) {
    rep.const_g = rep.level_g / rep.budget;
    rep.const_h1 = rep.level_h1 / rep.budget;
    rep.const_h2 = rep.level_h2_outside / rep.budget;
    rep.const_omega = rep.omega_star / rep.budget;
  }
  double cheb = rep.g_l2_sq / (alpha * alpha);
  rep.g_chebyshev_ratio = cheb > 0 ? rep.level_g / cheb : 0.0;
  return rep;
}

}  // namespace hermite_riesz
