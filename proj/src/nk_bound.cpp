#include <cmath>

#include "hermite_riesz/analysis.hpp"
#include "hermite_riesz/error.hpp"
#include "hermite_riesz/multiplier_decomp.hpp"
#include "hermite_riesz/output.hpp"

namespace hermite_riesz {

std::vector<double> part_shell_energies(const CZPart& part, const TensorGrid& grid, int K)
{
  int n = grid.dim;
  std::size_t span = 1;
  while (std::pow(static_cast<double>(span), n) < static_cast<double>(part.cells.size())) span *= 2;
  if (std::pow(static_cast<double>(span), n) != static_cast<double>(part.cells.size()))
    throw ConfigError("part_shell_energies: part is not a dyadic cube of cells");
  std::vector<RowMatrix> A;
  for (int d = 0; d < n; ++d) {
    std::size_t first = static_cast<std::size_t>(part.cube.index[d]) * span;
    std::span<const double> edges(grid.axis_edges[d].data() + first, span + 1);
    A.push_back(hermite_cell_integrals(K, edges));
  }
  // local tensor in row-major cube order, contract axis by axis
  std::vector<double> T = part.values;
  std::vector<std::size_t> shape(n, span);
  for (int d = 0; d < n; ++d) {
    std::size_t pre = 1, post = 1;
    for (int i = 0; i < d; ++i) pre *= shape[i];
    for (int i = d + 1; i < n; ++i) post *= shape[i];
    std::size_t mid = shape[d], out_mid = static_cast<std::size_t>(K + 1);
    std::vector<double> R(pre * out_mid * post);
    for (std::size_t p = 0; p < pre; ++p) {
      Eigen::Map<const RowMatrix> in(T.data() + p * mid * post, mid, post);
      Eigen::Map<RowMatrix> out(R.data() + p * out_mid * post, out_mid, post);
      out.noalias() = A[d] * in;
    }
    shape[d] = out_mid;
    T.swap(R);
  }
  std::vector<double> E(K + 1, 0.0);
  std::vector<int> digit(n, 0);
  for (std::size_t i = 0; i < T.size(); ++i) {
    std::size_t rem = i;
    int deg = 0;
    for (int d = n - 1; d >= 0; --d) {
      deg += static_cast<int>(rem % static_cast<std::size_t>(K + 1));
      rem /= static_cast<std::size_t>(K + 1);
    }
    if (deg <= K) E[deg] += T[i] * T[i];
  }
  return E;
}

NkBoundReport nk_bj_bound_check(const CZPart& part, const TensorGrid& grid, double alpha, int k, double R, double p,
                                const RestrictionTable& table, const NkBoundOptions& opt)
{
  int n = grid.dim;
  if (k < 1) throw ConfigError("nk_bj_bound_check: k must be >= 1");
  double delta = critical_index(n, p).delta;
  double twok = std::ldexp(1.0, k);
  double lo_I = R * R * (1 - 1 / twok) * (1 - 1 / twok) - 1;
  double hi_I = R * R * (1 + 1 / twok) * (1 + 1 / twok) + 1;
  if (hi_I > opt.K)
    throw NumericalError("nk_bj_bound_check: range (I) reaches shell " + io::format_double(hi_I) +
                         " beyond cached K=" + std::to_string(opt.K));
  if (static_cast<int>(table.sup_phi.size()) <= opt.K || table.n != n)
    throw ConfigError("nk_bj_bound_check: restriction table does not cover K");

  DecompositionOptions dopt;
  dopt.scan_guard = false;
  auto pieces = decompose_large_k(R, delta, k, opt.M, dopt);
  auto nk2 = [&](double l) {
    double v = pieces.n_k(std::sqrt(2.0 * l + n));
    return v * v;
  };

  NkBoundReport r;
  r.k = k;
  r.R = R;
  r.p = p;
  r.n = n;
  r.alpha = alpha;
  r.ball_radius = part.ball_radius;
  double cellvol = 1;
  for (int d = 0; d < n; ++d) cellvol *= grid.axis_edges[d][1] - grid.axis_edges[d][0];
  double b1 = 0, bp = 0;
  for (double v : part.values) {
    b1 += std::abs(v);
    bp += std::pow(std::abs(v), p);
  }
  b1 *= cellvol;
  r.b_p = std::pow(bp * cellvol, 1.0 / p);
  double bp2 = r.b_p * r.b_p;

  auto E = part_shell_energies(part, grid, opt.K);
  double head = 0, restr = 0;
  for (int l = 0; l <= opt.K; ++l) {
    double w = nk2(l);
    head += w * E[l];
    restr += w * table.sup_phi[l];
    double m = bp2 > 0 ? w * E[l] / bp2 : 0.0;
    if (l <= lo_I) r.measured_III += m;
    else if (l < hi_I) r.measured_I += m;
    else r.measured_II += m;
  }
  double tail = 0;
  for (long l = opt.K + 1;; ++l) {
    double w = nk2(static_cast<double>(l));
    double term = w * table.sup_beyond(static_cast<int>(std::min<long>(l, 1L << 30)));
    tail += term;
    if (l > hi_I && term * static_cast<double>(l) <= 1e-14 * (tail + restr + 1e-300)) break;
    if (l > (1L << 28)) break;
  }
  restr += tail;
  r.head_norm = std::sqrt(head);
  r.tail_majorant = std::sqrt(tail) * b1;
  r.norm_estimate = std::sqrt(head + tail * b1 * b1);
  if (bp2 > 0) r.measured_II += tail * b1 * b1 / bp2;
  r.restriction_bound = std::sqrt(restr) * b1;
  double B = part.ball_volume();
  r.rhs_scale = alpha * std::sqrt(B) * std::max(std::sqrt(twok) / R, 1.0);
  r.ratio = r.rhs_scale > 0 ? r.norm_estimate / r.rhs_scale : 0.0;
  r.restriction_ratio = r.rhs_scale > 0 ? r.restriction_bound / r.rhs_scale : 0.0;

  // majorant sums with the envelope exponent 2M and unit constant
  double N = 2.0 * opt.M;
  auto T = [&](double l) {
    return std::exp2(-2 * delta * k) * std::pow(1 + twok * std::abs(std::sqrt(l) / R - 1), -2 * N) * std::pow(l, delta - 0.5);
  };
  for (long l = 1; l <= static_cast<long>(std::floor(lo_I)); ++l) r.sum_III += T(double(l));
  for (long l = std::max(1L, static_cast<long>(std::floor(lo_I)) + 1); l < hi_I; ++l) r.sum_I += T(double(l));
  for (long l = static_cast<long>(std::ceil(hi_I));; ++l) {
    double t = T(double(l));
    r.sum_II += t;
    if (t * static_cast<double>(l) <= 1e-16 * r.sum_II) break;
  }
  double base = std::pow(twok / R, 2.0 * n * (0.5 - 1.0 / p));
  r.formula_II_III = base;
  r.formula_I = base * std::max(1.0, twok / (R * R));
  return r;
}

}  // namespace hermite_riesz
