#include "hermite_riesz/multiplier_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/fourier.hpp"
#include "hermite_riesz/output.hpp"
#include "quadrature_rules.hpp"

namespace hermite_riesz {

namespace {

using Rule = detail::Legendre<20>;

double sinc(double v) { return v == 0.0 ? 1.0 : std::sin(v) / v; }

double profile_from_factors(double A, double B, double delta)
{
  if (A <= 0 || B <= 0) return 0.0;
  if (delta == 0.0) return 1.0;
  if (delta == 0.5) return std::sqrt(A * B);
  if (delta == 1.0) return A * B;
  return std::pow(A * B, delta);
}

}  // namespace

double BandLimitedBump::operator()(double u) const
{
  double a = std::pow(sinc(u * scale1), 2 * M);
  double b = std::pow(sinc(u * scale2), 2 * M);
  return 0.5 * (a + b);
}

BandLimitedBump build_bump(int M)
{
  if (M < 4) throw ConfigError("build_bump: M must be >= 4");
  BandLimitedBump b;
  b.M = M;
  b.scale1 = 1.0 / (4.0 * M);
  b.scale2 = 1.0 / (4.0 * M * std::numbers::phi);
  return b;
}

namespace {

// CDF of the Irwin-Hall distribution of order n at x.
double irwin_hall_cdf(int n, double x)
{
  if (x <= 0) return 0.0;
  if (x >= n) return 1.0;
  std::vector<double> f(n);
  for (int j = 0; j < n; ++j) f[j] = std::clamp(x - j, 0.0, 1.0);
  for (int m = 2; m <= n; ++m)
    for (int j = 0; j + m <= n; ++j) {
      double y = x - j;
      f[j] = (y * f[j] + (m - y) * f[j + 1]) / m;
    }
  return f[0];
}

}  // namespace

double FourierCutoff::theta(double tau) const
{
  tau = std::abs(tau);
  if (tau <= 0.5) return 1.0;
  if (tau >= 1.0) return 0.0;
  // theta(tau) = P(|tau - X| <= 3/4), X a sum of `order` uniforms on [-a, a]
  double a = 1.0 / (4.0 * order);
  auto cdf = [&](double x) { return irwin_hall_cdf(order, (x + order * a) / (2.0 * a)); };
  return cdf(tau + 0.75) - cdf(tau - 0.75);
}

double FourierCutoff::inverse(double w) const
{
  return 3.0 / (4.0 * std::numbers::pi) * sinc(0.75 * w) * std::pow(sinc(w / (4.0 * order)), order);
}

FourierCutoff build_cutoff(int order)
{
  if (order < 2) throw ConfigError("build_cutoff: order must be >= 2");
  return FourierCutoff{order};
}

double bochner_riesz_profile(double lambda, double R, double delta)
{
  double r = lambda / R;
  return profile_from_factors(1.0 - r, 1.0 + r, delta);
}

double bochner_riesz_fourier_transform(double t, double R, double delta)
{
  double nu = delta + 0.5;
  double z = R * std::abs(t);
  double c = R * std::sqrt(std::numbers::pi) * std::tgamma(delta + 1.0);
  if (z < 1e-6) return c / std::tgamma(nu + 1.0) * (1.0 - z * z / (4.0 * (nu + 1.0)));
  return c * std::pow(2.0 / z, nu) * std::cyl_bessel_j(nu, z);
}

namespace {

// m_k(lambda) = int_{|w| <= W} S(lambda - R w / 2^k) vartheta(w) dw, composite Gauss-Legendre
// on panels of width 2 with vartheta cached, geometric grading at the edges of supp S.
class MkEvaluator
{
 public:
  MkEvaluator(double R, double delta, int k, FourierCutoff cut, double W)
      : R_(R), delta_(delta), inv_scale_(std::ldexp(1.0, -k)), scale_(std::ldexp(1.0, k)), cut_(cut)
  {
    npanels_ = static_cast<int>(std::ceil(W / kPanel));
    W_ = npanels_ * kPanel;
    const auto& rule = Rule::get();
    cache_.resize(static_cast<std::size_t>(2 * npanels_) * rule.x.size());
    for (int j = 0; j < 2 * npanels_; ++j) {
      double c = -W_ + (j + 0.5) * kPanel;
      for (std::size_t i = 0; i < rule.x.size(); ++i)
        cache_[j * rule.x.size() + i] = cut_.inverse(c + 0.5 * kPanel * rule.x[i]);
    }
  }

  double operator()(double lambda) const
  {
    const auto& rule = Rule::get();
    double r = lambda / R_;
    double lo = scale_ * (r - 1.0);  // S edge mu = R (A = 0)
    double hi = scale_ * (r + 1.0);  // S edge mu = -R (B = 0)
    double a = std::max(lo, -W_), b = std::min(hi, W_);
    if (a >= b) return 0.0;
    bool edge_a = lo > -W_, edge_b = hi < W_;
    double a0 = 1.0 - r;
    auto S_at = [&](double w) {
      double A = a0 + w * inv_scale_;
      return profile_from_factors(A, 2.0 - A, delta_);
    };
    auto plain = [&](double p, double q) {
      return rule.integrate(p, q, [&](double w) { return S_at(w) * cut_.inverse(w); });
    };
    // graded toward the edge e, over [e, e + L] (dir = +1) or [e - L, e] (dir = -1)
    auto graded = [&](double e, double L, int dir) {
      double total = 0.0, hi_off = L;
      while (hi_off > 1e-15 * std::max(1.0, std::abs(e))) {
        double lo_off = 0.25 * hi_off;
        total += rule.integrate(lo_off, hi_off, [&](double s) {
          double E = s * inv_scale_;
          double S = profile_from_factors(E, 2.0 - E, delta_);
          return S * cut_.inverse(e + dir * s);
        });
        hi_off = lo_off;
      }
      return total;
    };
    auto partial = [&](double p, double q) {
      bool gp = edge_a && p == a, gq = edge_b && q == b;
      if (gp && gq) {
        double m = 0.5 * (p + q);
        return graded(p, m - p, +1) + graded(q, q - m, -1);
      }
      if (gp) return graded(p, q - p, +1);
      if (gq) return graded(q, q - p, -1);
      return plain(p, q);
    };

    int ja = static_cast<int>(std::ceil((a + W_) / kPanel));
    int jb = static_cast<int>(std::floor((b + W_) / kPanel));
    if (ja > jb) return partial(a, b);
    double total = 0.0;
    double ga = -W_ + ja * kPanel, gb = -W_ + jb * kPanel;
    if (a < ga) total += partial(a, ga);
    if (gb < b) total += partial(gb, b);
    for (int j = ja; j < jb; ++j) {
      double c = -W_ + (j + 0.5) * kPanel;
      double s = 0.0;
      const double* th = &cache_[j * rule.x.size()];
      // the panel touching a graded edge is handled by partial(); here both ends are interior
      if ((edge_a && j == ja && ga == a) || (edge_b && j == jb - 1 && gb == b)) {
        total += partial(std::max(a, c - 0.5 * kPanel), std::min(b, c + 0.5 * kPanel));
        continue;
      }
      for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * S_at(c + 0.5 * kPanel * rule.x[i]) * th[i];
      total += 0.5 * kPanel * s;
    }
    return total;
  }

 private:
  static constexpr double kPanel = 2.0;
  double R_, delta_, inv_scale_, scale_;
  FourierCutoff cut_;
  double W_ = 0.0;
  int npanels_ = 0;
  std::vector<double> cache_;
};

void check_args(double R, double delta, int M)
{
  if (!(R > 0)) throw ConfigError("decompose: R must be > 0");
  if (!(delta >= 0)) throw ConfigError("decompose: delta must be >= 0");
  if (M < 4) throw ConfigError("decompose: M must be >= 4");
}

}  // namespace

double DecompositionPieces::n_radius() const { return std::ldexp(1.0, k) / (2.0 * R); }

double DecompositionPieces::m_radius() const { return std::ldexp(1.0, k) / R; }

double DecompositionPieces::identity_residual(double lambda) const
{
  double s = S(lambda);
  double n = n_k(lambda), e = eta_k(lambda);
  double rhs = m_k ? (*m_k)(lambda) + e * n : e * n + s * n;
  return std::abs(s - rhs);
}

DecompositionPieces decompose_small_k(double R, double delta, int k, int M, const DecompositionOptions& opt)
{
  check_args(R, delta, M);
  if (k > 0) throw ConfigError("decompose_small_k: k must be <= 0");
  auto psi = build_bump(M);
  double s = std::ldexp(1.0, k) / R;
  DecompositionPieces d;
  d.k = k;
  d.R = R;
  d.delta = delta;
  d.M = M;
  d.guard_threshold = opt.guard;
  d.residual_tol = opt.tol;
  d.n_k = [psi, s](double lambda) { return psi(s * lambda); };
  d.eta_k = [psi, s, R, delta](double lambda) {
    double S = bochner_riesz_profile(lambda, R, delta);
    if (S == 0.0) return 0.0;
    double n = psi(s * lambda);
    return S * (1.0 - n) / n;
  };
  return d;
}

std::vector<double> lambda_sample_grid(double R, int uniform_count, int refine_levels)
{
  if (!(R > 0) || uniform_count < 2) throw ConfigError("lambda_sample_grid: bad arguments");
  std::vector<double> g;
  for (int i = 0; i < uniform_count; ++i) g.push_back(3.0 * R * i / (uniform_count - 1));
  for (int j = 4; j <= 4 * refine_levels; ++j) {
    double off = R * std::exp2(-j / 4.0);
    g.push_back(R - off);
    g.push_back(R + off);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

DecompositionPieces decompose_large_k(double R, double delta, int k, int M, const DecompositionOptions& opt)
{
  check_args(R, delta, M);
  if (k < 1) throw ConfigError("decompose_large_k: k must be >= 1");
  auto psi = build_bump(M);
  int order = opt.cutoff_order > 0 ? opt.cutoff_order : M + 4;
  auto mk = std::make_shared<MkEvaluator>(R, delta, k, build_cutoff(order), opt.window);
  double s = std::ldexp(1.0, k) / R;
  double amp = std::exp2(-delta * k);
  DecompositionPieces d;
  d.k = k;
  d.R = R;
  d.delta = delta;
  d.M = M;
  d.guard_threshold = opt.guard;
  d.residual_tol = opt.tol;
  d.n_k = [psi, s, amp, R](double lambda) { return amp * (psi(s * (lambda - R)) + psi(s * (lambda + R))); };
  d.m_k = [mk](double lambda) { return (*mk)(std::abs(lambda)); };
  double eps = opt.guard;
  auto nk = d.n_k;
  d.eta_k = [mk, nk, eps, R, delta](double lambda) {
    double n = nk(lambda);
    if (std::abs(n) <= eps) return 0.0;
    return (bochner_riesz_profile(lambda, R, delta) - (*mk)(std::abs(lambda))) / n;
  };
  if (opt.scan_guard) {
    double worst = 0.0, worst_lambda = 0.0;
    for (double lambda : lambda_sample_grid(R, 601, k + 16)) {
      if (std::abs(nk(lambda)) > eps) continue;
      double r = std::abs(bochner_riesz_profile(lambda, R, delta) - (*mk)(lambda));
      if (r > worst) {
        worst = r;
        worst_lambda = lambda;
      }
    }
    if (worst > opt.tol)
      throw NumericalError("decompose_large_k: guarded quotient violated at lambda=" + io::format_double(worst_lambda) +
                           " (|S - m_k| = " + io::format_double(worst) + " where |n_k| <= " + io::format_double(eps) +
                           "); raise M or refine sampling");
  }
  return d;
}

double envelope_constant(const DecompositionPieces& d, double N, bool* fit_ok)
{
  double scale = std::ldexp(1.0, d.k);
  bool large = d.m_k.has_value();
  double log_amp = large ? d.delta * d.k * std::numbers::ln2 : 0.0;
  double best = 0.0, dec_prev = 0.0, dec_last = 0.0;
  auto visit = [&](double u) {
    double lambda = large ? d.R * (1.0 + u / scale) : d.R * u / scale;
    if (lambda < 0) return;
    double n = std::abs(d.n_k(lambda));
    if (n == 0.0) return;
    double v = std::exp(std::log(n) + log_amp + N * std::log1p(std::abs(u)));
    best = std::max(best, v);
    double au = std::abs(u);
    if (au >= 1e4 && au < 1e5) dec_prev = std::max(dec_prev, v);
    if (au >= 1e5) dec_last = std::max(dec_last, v);
  };
  if (large)
    for (double u = -scale; u < 0; u += std::min(0.25, scale / 64)) visit(u);
  // lobes of psi are about 4 pi M wide in u
  for (double u = 0; u <= 1e6; u += u < 1e3 ? 0.25 : 2.0) visit(u);
  if (fit_ok) *fit_ok = std::isfinite(best) && dec_last <= 1.5 * dec_prev;
  return best;
}

namespace {

struct PieceScan
{
  PropertyReport report;
  std::vector<double> eta;
};

double max_leakage_nk(const DecompositionPieces& d, const VerifyOptions& opt)
{
  auto psi = build_bump(d.M);
  int N = opt.fourier_samples;
  double scale = std::ldexp(1.0, d.k) / d.R;
  bool large = d.m_k.has_value();
  double half = 400.0 / scale;
  std::vector<double> v(N);
  if (large) {
    double H = d.R + half;
    double spacing = 2.0 * H / N;
    if (spacing * scale <= 0.5) {
      for (int i = 0; i < N; ++i) v[i] = d.n_k(-H + i * spacing);
      return fourier_leakage(v, spacing, d.n_radius());
    }
  }
  // one translate of the scaled bump; for the symmetrized large-k piece this bounds
  // the relative leakage of the sum
  double spacing = 2.0 * half / N;
  for (int i = 0; i < N; ++i) v[i] = psi(scale * (-half + i * spacing));
  return fourier_leakage(v, spacing, d.n_radius());
}

double leakage_mk(const DecompositionPieces& d, double window, const VerifyOptions& opt)
{
  int N = opt.m_fourier_samples;
  double H = d.R + (window + 8.0) * d.R / std::ldexp(1.0, d.k);
  double spacing = 2.0 * H / N;
  std::vector<double> v(N);
  // sample i sits at (i - N/2) * spacing; m_k is even
  for (int j = 0; j <= N / 2; ++j) {
    double m = (*d.m_k)(j * spacing);
    if (j < N / 2) v[N / 2 + j] = m;
    v[N / 2 - j] = m;
  }
  return fourier_leakage(v, spacing, d.m_radius());
}

PieceScan scan_piece(const DecompositionPieces& d, std::span<const double> lambdas, const VerifyOptions& opt)
{
  PieceScan out;
  auto& r = out.report;
  out.eta.resize(lambdas.size());
  double R2g = std::pow(d.R, 2.0 * opt.gamma);
  double scale = std::ldexp(1.0, d.k) / d.R;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    double lambda = lambdas[i];
    double S = d.S(lambda);
    double n = d.n_k(lambda);
    double e = d.eta_k(lambda);
    out.eta[i] = e;
    double rhs = d.m_k ? (*d.m_k)(lambda) + e * n : e * n + S * n;
    r.identity_residual = std::max(r.identity_residual, std::abs(S - rhs));
    r.square_sum_max = std::max(r.square_sum_max, e * e);
    r.weighted_square_sum = std::max(r.weighted_square_sum, e * e * std::pow(1.0 + lambda * lambda, opt.gamma) / R2g);
    if (!d.m_k && S > 0 && lambda > 0) {
      double u = scale * lambda;
      r.eta_min_bound = std::max(r.eta_min_bound, std::abs(e) / std::min(1.0, u * u));
    }
  }
  r.fourier_leakage = max_leakage_nk(d, opt);
  if (d.m_k && d.k <= opt.max_k_for_m_leakage)
    r.fourier_leakage = std::max(r.fourier_leakage, leakage_mk(d, 300.0, opt));
  r.envelope_constant = envelope_constant(d, 2.0 * d.M, &r.envelope_fit_ok);
  return out;
}

}  // namespace

PropertyReport verify_decomposition(const DecompositionPieces& d, std::span<const double> lambdas,
                                    const VerifyOptions& opt)
{
  return scan_piece(d, lambdas, opt).report;
}

FamilyAudit audit_family(double R, double delta, int M, int k_min, int k_max, std::span<const double> lambdas,
                         const VerifyOptions& opt)
{
  if (k_min > k_max) throw ConfigError("audit_family: empty k range");
  FamilyAudit fa;
  fa.R = R;
  fa.delta = delta;
  fa.M = M;
  std::vector<double> small(lambdas.size(), 0.0), large(lambdas.size(), 0.0);
  double R2g = std::pow(R, 2.0 * opt.gamma);
  for (int k = k_min; k <= k_max; ++k) {
    auto d = k <= 0 ? decompose_small_k(R, delta, k, M) : decompose_large_k(R, delta, k, M);
    auto scan = scan_piece(d, lambdas, opt);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      double e2 = scan.eta[i] * scan.eta[i];
      if (k <= 0) small[i] += e2;
      else large[i] += e2 * std::pow(1.0 + lambdas[i] * lambdas[i], opt.gamma) / R2g;
    }
    fa.max_identity_residual = std::max(fa.max_identity_residual, scan.report.identity_residual);
    fa.max_fourier_leakage = std::max(fa.max_fourier_leakage, scan.report.fourier_leakage);
    fa.rows.push_back({k, scan.report});
  }
  fa.small_square_sum_max = *std::max_element(small.begin(), small.end());
  fa.weighted_square_sum = *std::max_element(large.begin(), large.end());
  return fa;
}

double m_k_fourier_route(double lambda, double R, double delta, int k, const FourierCutoff& theta)
{
  double T = std::ldexp(1.0, k) / R;
  int panels = std::max(16, static_cast<int>(std::ceil(T * (R + std::abs(lambda)) / std::numbers::pi)) * 2);
  const auto& rule = Rule::get();
  double h = T / panels, total = 0.0;
  for (int j = 0; j < panels; ++j)
    total += rule.integrate(j * h, (j + 1) * h, [&](double t) {
      return bochner_riesz_fourier_transform(t, R, delta) * theta.theta(t / T) * std::cos(t * lambda);
    });
  return total / std::numbers::pi;
}

std::vector<double> bochner_riesz_transform_dft(double R, double delta, int log2n, std::span<const double> t)
{
  std::size_t N = std::size_t{1} << log2n;
  double x0 = -4.0 * R, dx = 8.0 * R / N;
  std::vector<double> s(N);
  for (std::size_t j = 0; j < N; ++j) s[j] = bochner_riesz_profile(x0 + j * dx, R, delta);
  std::vector<double> out;
  out.reserve(t.size());
  for (double tv : t) {
    // S is even, so the transform is the cosine sum
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) acc += s[j] * std::cos(tv * (x0 + j * dx));
    out.push_back(acc * dx);
  }
  return out;
}

}  // namespace hermite_riesz
