#include "hermite_riesz/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/output.hpp"

namespace hermite_riesz {

std::string to_string(NormMethod m)
{
  switch (m) {
    case NormMethod::ExactKernel: return "exact-kernel";
    case NormMethod::TestFamilyLowerBound: return "test-family lower bound";
    case NormMethod::SortedLevelSet: return "sorted-level-set";
    case NormMethod::Quadrature: return "quadrature";
  }
  return "?";
}

double SweepResult::ratio_spread() const
{
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (double r : ratios) {
    if (!std::isfinite(r)) continue;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi / lo;
}

double SweepResult::loglog_slope() const
{
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!(axis[i] > 0) || !(values[i] > 0)) continue;
    double x = std::log(axis[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return 0.0;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

NormReport weak_lp_quasinorm(std::span<const double> values, std::span<const double> measures, double p)
{
  if (!(p >= 1)) throw ConfigError("weak_lp_quasinorm: p must be >= 1");
  if (values.size() != measures.size()) throw ConfigError("weak_lp_quasinorm: size mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(values[a]) > std::abs(values[b]); });
  double cum = 0, best = 0;
  for (std::size_t i : order) {
    cum += measures[i];
    best = std::max(best, std::abs(values[i]) * std::pow(cum, 1.0 / p));
  }
  NormReport r;
  r.value = best;
  r.method = NormMethod::SortedLevelSet;
  r.family_size = 1;
  return r;
}

NormReport weak_lp_quasinorm(const GridFunction& f, double p)
{
  auto w = f.grid->measures();
  return weak_lp_quasinorm(f.values, w, p);
}

NormReport lp_norm(const GridFunction& f, double p)
{
  if (!(p >= 1)) throw ConfigError("lp_norm: p must be >= 1");
  auto w = f.grid->measures();
  double s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) s += std::pow(std::abs(f.values[i]), p) * w[i];
  NormReport r;
  r.value = std::pow(s, 1.0 / p);
  r.method = NormMethod::Quadrature;
  r.family_size = 1;
  return r;
}

namespace {

// Phi_k on the ray (r, 0, ..., 0) for all k <= K: sum_a h_a(r)^2 z_{k-a}.
std::vector<double> origin_profile(int n, int K)
{
  if (n == 1) {
    std::vector<double> z(K + 1, 0.0);
    z[0] = 1.0;
    return z;
  }
  std::vector<double> zero(n - 1, 0.0);
  return projection_diag_all_shells(K, zero);
}

double ray_phi(int k, double r, const std::vector<double>& z)
{
  auto h = hermite_values(k, r);
  double s = 0;
  for (int a = 0; a <= k; ++a) s += h[a] * h[a] * z[k - a];
  return s;
}

}  // namespace

double RestrictionTable::sup_beyond(int l) const
{
  int K = static_cast<int>(sup_phi.size()) - 1;
  if (l <= K) return sup_phi[l];
  double e = (n - 2) / 2.0, c = 0;
  for (int j = std::max(1, K / 2); j <= K; ++j) c = std::max(c, sup_phi[j] / std::pow(double(j), e));
  return c * std::pow(double(l), e);
}

RestrictionTable restriction_table(int n, int K, const RestrictionOptions& opt)
{
  if (n < 1 || K < 0) throw ConfigError("restriction_table: bad n or K");
  double needed = std::sqrt(2.0 * K + n);
  double rmax = opt.ray_max > 0 ? opt.ray_max : needed + opt.ray_margin;
  if (rmax < needed)
    throw NumericalError("restriction sweep: ray ends at " + io::format_double(rmax) +
                         " before the classically allowed radius " + io::format_double(needed));
  auto z = origin_profile(n, K);
  int npts = static_cast<int>(std::ceil(rmax / opt.ray_step)) + 1;
  std::vector<double> rs(npts);
  for (int i = 0; i < npts; ++i) rs[i] = i * opt.ray_step;
  auto basis = hermite_eval_1d(K, rs);
  RestrictionTable t;
  t.n = n;
  t.sup_phi.assign(K + 1, 0.0);
  t.argmax.assign(K + 1, 0.0);
  std::vector<double> h2(K + 1);
  for (int i = 0; i < npts; ++i) {
    for (int a = 0; a <= K; ++a) h2[a] = basis(a, i) * basis(a, i);
    for (int k = 0; k <= K; ++k) {
      double s = 0;
      for (int a = 0; a <= k; ++a) s += h2[a] * z[k - a];
      if (s > t.sup_phi[k]) {
        t.sup_phi[k] = s;
        t.argmax[k] = rs[i];
      }
    }
  }
  // golden-section refinement around each discrete maximum
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int k = 0; k <= K; ++k) {
    double a = std::max(0.0, t.argmax[k] - opt.ray_step), b = t.argmax[k] + opt.ray_step;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = ray_phi(k, c, z), fd = ray_phi(k, d, z);
    for (int it = 0; it < 40; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = ray_phi(k, c, z);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = ray_phi(k, d, z);
      }
    }
    double r = 0.5 * (a + b), v = ray_phi(k, r, z);
    if (v > t.sup_phi[k]) {
      t.sup_phi[k] = v;
      t.argmax[k] = r;
    }
  }
  return t;
}

SweepResult restriction_constant_sweep(int n, int k_min, int k_max, const RestrictionOptions& opt)
{
  if (k_min < 0 || k_max < k_min) throw ConfigError("restriction sweep: bad k range");
  auto t = restriction_table(n, k_max, opt);
  SweepResult s;
  s.axis_name = "k";
  s.reference_exponent = (n - 2) / 4.0;
  for (int k = k_min; k <= k_max; ++k) {
    double v = std::sqrt(t.sup_phi[k]);
    s.axis.push_back(k);
    s.values.push_back(v);
    double r = v / std::pow(std::max(k, 1), s.reference_exponent);
    s.ratios.push_back(r);
    s.fitted_constant = std::max(s.fitted_constant, r);
  }
  return s;
}

double projection_diag_bruteforce(int k, std::span<const double> y)
{
  int n = static_cast<int>(y.size());
  std::vector<std::vector<double>> h;
  for (double v : y) h.push_back(hermite_values(k, v));
  double s = 0;
  for (const auto& a : enumerate_shell(n, k)) {
    double p = 1;
    for (int d = 0; d < n; ++d) p *= h[d][a[d]] * h[d][a[d]];
    s += p;
  }
  return s;
}

namespace {

CoeffRep truncate(const CoeffRep& c, int K)
{
  CoeffRep r = CoeffRep::zeros(c.dim, std::min(K, c.K));
  for (int k = 0; k <= r.K; ++k) r.shells[k] = c.shells[k];
  return r;
}

// largest k with 2k + n < R^2, -1 if none
int last_live_shell(double R, int n)
{
  int k = static_cast<int>(std::ceil((R * R - n) / 2.0)) - 1;
  while (k >= 0 && 2.0 * k + n >= R * R) --k;
  while (2.0 * (k + 1) + n < R * R) ++k;
  return k;
}

}  // namespace

NormReport apriori_constant(int n, double p, const std::vector<FamilyMember>& family,
                            std::shared_ptr<const TensorGrid> grid)
{
  if (family.empty()) throw ConfigError("apriori_constant: empty test family");
  auto ci = critical_index(n, p);
  if (!ci.in_range) throw ConfigError("apriori_constant: p outside [1, 2n/(n+2)]");
  auto F = resolvent_multiplier(ci.gamma);
  NormReport r;
  r.method = NormMethod::TestFamilyLowerBound;
  r.family_size = static_cast<int>(family.size());
  std::string best;
  for (const auto& m : family) {
    double l2 = m.coeffs.norm();
    if (l2 == 0) continue;
    auto u = synthesize(apply_multiplier(F, m.coeffs), grid);
    double ratio = weak_lp_quasinorm(u, p).value / l2;
    if (ratio > r.value) {
      r.value = ratio;
      best = m.name;
    }
  }
  r.description = "max over " + std::to_string(family.size()) + " members of ||(1+H)^{-gamma/2} f||_{p,inf}/||f||_2, attained by " + best;
  return r;
}

FsCheckResult fs_support_check(const MultiplierSpec& F, const std::vector<int>& Ks, const Eigen::MatrixXd& points,
                               std::span<const double> measures)
{
  if (!F.fourier_support_radius)
    throw ConfigError("fs_support_check: multiplier " + F.name + " declares no Fourier support radius");
  if (static_cast<std::size_t>(points.rows()) != measures.size()) throw ConfigError("fs_support_check: size mismatch");
  double r = *F.fourier_support_radius;
  FsCheckResult out;
  out.sweep.axis_name = "K";
  KernelOptions ko;
  ko.accept_truncation = true;
  for (int K : Ks) {
    auto km = multiplier_kernel(F, points, K, ko);
    double inside = 0, outside = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      for (Eigen::Index j = 0; j < points.rows(); ++j) {
        double w = km.values(i, j) * km.values(i, j) * measures[i] * measures[j];
        double d = (points.row(i) - points.row(j)).norm();
        (d > r ? outside : inside) += w;
      }
    out.sweep.axis.push_back(K);
    double leak = inside + outside > 0 ? outside / (inside + outside) : 0.0;
    out.sweep.values.push_back(leak);
    out.sweep.ratios.push_back(leak);
  }
  out.non_increasing = true;
  for (std::size_t i = 1; i < out.sweep.values.size(); ++i)
    if (out.sweep.values[i] > out.sweep.values[i - 1]) out.non_increasing = false;
  out.sweep.fitted_constant = out.sweep.values.empty() ? 0.0 : out.sweep.values.back();
  return out;
}

WeakTypeResult weak_type_sweep(int n, double p, const std::vector<double>& Rs, const std::vector<FamilyMember>& family,
                               double delta, std::shared_ptr<const TensorGrid> grid)
{
  if (family.empty()) throw ConfigError("weak_type_sweep: empty test family");
  if (!(p >= 1)) throw ConfigError("weak_type_sweep: p must be >= 1");
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    if (!(Rs[i] >= 1)) throw ConfigError("weak_type_sweep: R values must be >= 1");
    if (i && !(Rs[i] > Rs[i - 1])) throw ConfigError("weak_type_sweep: R values must increase");
  }
  WeakTypeResult out;
  out.sweep.axis_name = "R";
  out.sweep.axis = Rs;
  out.sweep.values.assign(Rs.size(), 0.0);
  std::vector<double> fnorm;
  for (const auto& m : family) {
    fnorm.push_back(lp_norm(synthesize(m.coeffs, grid), p).value);
    out.member_names.push_back(m.name);
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& c = family[i].coeffs;
    std::vector<double> row;
    for (std::size_t j = 0; j < Rs.size(); ++j) {
      int live = last_live_shell(Rs[j], n);
      if (live > c.K)
        throw NumericalError("weak_type_sweep: R=" + io::format_double(Rs[j]) + " needs shells up to K=" +
                             std::to_string(live) + ", cached K=" + std::to_string(c.K));
      double ratio = 0.0;
      if (live >= 0 && fnorm[i] > 0) {
        auto sc = apply_multiplier(bochner_riesz_spec(Rs[j], delta), truncate(c, live));
        ratio = weak_lp_quasinorm(synthesize(sc, grid), p).value / fnorm[i];
      }
      row.push_back(ratio);
      out.sweep.values[j] = std::max(out.sweep.values[j], ratio);
    }
    out.member_ratios.push_back(row);
  }
  out.sweep.reference_exponent = 0.0;
  out.sweep.ratios = out.sweep.values;
  out.sweep.fitted_constant = *std::max_element(out.sweep.values.begin(), out.sweep.values.end());
  out.slope = out.sweep.loglog_slope();
  out.max_over_min = out.sweep.ratio_spread();
  out.uniform = out.slope <= kUniformitySlope;
  return out;
}

ConvergenceResult convergence_sweep(const CoeffRep& c, double p, double delta, const std::vector<double>& Rs,
                                    std::shared_ptr<const TensorGrid> grid)
{
  ConvergenceResult out;
  out.sweep.axis_name = "R";
  out.sweep.axis = Rs;
  auto f = synthesize(c, grid);
  int top = -1;
  for (int k = 0; k <= c.K; ++k)
    if (c.shell_norm2(k) > 0) top = k;
  out.top_eigenvalue = top >= 0 ? 2.0 * top + c.dim : 0.0;
  auto w = grid->measures();
  for (double R : Rs) {
    auto S = bochner_riesz_spec(R, delta);
    auto sf = synthesize(apply_multiplier(S, c), grid);
    std::vector<double> diff(sf.values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = sf.values[i] - f.values[i];
    out.sweep.values.push_back(weak_lp_quasinorm(diff, w, p).value);
    MultiplierSpec defect;
    defect.name = "defect";
    defect.eval = [S](double lambda) { return S(lambda) - 1.0; };
    out.coefficient_route.push_back(weak_lp_quasinorm(synthesize(apply_multiplier(defect, c), grid), p).value);
  }
  out.sweep.ratios = out.sweep.values;
  out.sweep.fitted_constant = out.sweep.values.empty() ? 0.0 : out.sweep.values.front();
  out.decreasing_past_top = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    if (Rs[i] * Rs[i] <= out.top_eigenvalue) continue;
    if (out.sweep.values[i] > prev * (1 + 1e-12)) out.decreasing_past_top = false;
    prev = out.sweep.values[i];
  }
  return out;
}

double orthogonality_trial_ratio(int n, int K, int members, int trials, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<double>> q(members, std::vector<double>(K + 1));
    for (auto& row : q)
      for (double& v : row) v = N01(rng);
    double A = 0;
    for (int k = 0; k <= K; ++k) {
      double s = 0;
      for (int m = 0; m < members; ++m) s += q[m][k] * q[m][k];
      A = std::max(A, s);
    }
    auto acc = CoeffRep::zeros(n, K);
    double rhs = 0;
    for (int m = 0; m < members; ++m) {
      auto f = CoeffRep::zeros(n, K);
      for (auto& sh : f.shells)
        for (double& v : sh) v = N01(rng);
      double fn = f.norm();
      rhs += fn * fn;
      for (int k = 0; k <= K; ++k)
        for (std::size_t j = 0; j < f.shells[k].size(); ++j) acc.shells[k][j] += q[m][k] * f.shells[k][j];
    }
    double lhs = acc.norm();
    worst = std::max(worst, lhs * lhs / (A * rhs));
  }
  return worst;
}

}  // namespace hermite_riesz
