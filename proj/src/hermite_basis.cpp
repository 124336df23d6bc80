#include "hermite_riesz/hermite_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "hermite_riesz/error.hpp"

namespace hermite_riesz {

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);
constexpr int kRescaleExp = 500;
const double kRescaleUp = std::ldexp(1.0, kRescaleExp);
const double kRescaleDown = std::ldexp(1.0, -kRescaleExp);

// h_k(x) = ldexp(u_k, e). Seed split so that e^{-x^2/2} never underflows.
struct ScaledSeed
{
  double u0;
  int e;
};

ScaledSeed seed(double x)
{
  double half = 0.5 * x * x;
  if (half < 700.0) return {kPiQuarter * std::exp(-half), 0};
  double b = -half / std::numbers::ln2;
  double e = std::floor(b);
  return {kPiQuarter * std::exp2(b - e), static_cast<int>(e)};
}

template <class Sink>
void run_recurrence(int k_max, double x, Sink&& sink)
{
  ScaledSeed s = seed(x);
  double prev = 0.0;
  double cur = s.u0;
  int e = s.e;
  sink(0, cur, e);
  for (int k = 0; k < k_max; ++k) {
    double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleUp) {
      cur *= kRescaleDown;
      prev *= kRescaleDown;
      e += kRescaleExp;
    }
    sink(k + 1, cur, e);
  }
}

}  // namespace

Basis1D hermite_eval_1d(int k_max, std::span<const double> points)
{
  if (k_max < 0) throw ConfigError("hermite_eval_1d: k_max must be >= 0");
  Basis1D b;
  b.k_max = k_max;
  b.points.assign(points.begin(), points.end());
  b.values.resize(k_max + 1, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw ConfigError("hermite_eval_1d: non-finite point");
    auto col = static_cast<Eigen::Index>(i);
    run_recurrence(k_max, points[i], [&](int k, double u, int e) {
      b.values(k, col) = e == 0 ? u : std::ldexp(u, e);
    });
  }
  return b;
}

std::vector<double> hermite_values(int k_max, double x)
{
  auto b = hermite_eval_1d(k_max, std::span<const double>(&x, 1));
  return std::vector<double>(b.values.data(), b.values.data() + k_max + 1);
}

std::size_t shell_size(int n, int k)
{
  if (n <= 0 || k < 0) return 0;
  // C(k+n-1, n-1)
  std::size_t r = 1;
  for (int i = 1; i < n; ++i) r = r * static_cast<std::size_t>(k + i) / static_cast<std::size_t>(i);
  return r;
}

std::vector<std::vector<int>> enumerate_shell(int n, int k)
{
  if (n <= 0) throw ConfigError("enumerate_shell: dimension must be >= 1");
  if (k < 0) throw ConfigError("enumerate_shell: degree must be >= 0");
  std::vector<std::vector<int>> out;
  out.reserve(shell_size(n, k));
  std::vector<int> cur(n, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int a = 0; a <= left; ++a) {
      cur[pos] = a;
      self(self, pos + 1, left - a);
    }
  };
  rec(rec, 0, k);
  return out;
}

std::size_t shell_offset(std::span<const int> alpha)
{
  int n = static_cast<int>(alpha.size());
  int left = 0;
  for (int a : alpha) left += a;
  std::size_t off = 0;
  for (int pos = 0; pos < n - 1; ++pos) {
    // entries with a smaller value at pos come first
    for (int a = 0; a < alpha[pos]; ++a) off += shell_size(n - pos - 1, left - a);
    left -= alpha[pos];
  }
  return off;
}

double QuadratureRule::raw_weight(std::size_t i) const { return std::exp(log_raw_weights[i]); }

QuadratureRule gauss_hermite_rule(int m)
{
  if (m < 1) throw ConfigError("gauss_hermite_rule: m must be >= 1");
  if (m > kMaxQuadratureNodes)
    throw ConfigError("gauss_hermite_rule: m exceeds the stability cap of " +
                      std::to_string(kMaxQuadratureNodes));

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sub(std::max(m - 1, 0));
  for (int k = 1; k < m; ++k) sub(k - 1) = std::sqrt(k / 2.0);
  std::vector<double> x(m, 0.0);
  if (m > 1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("gauss_hermite_rule: eigensolver failed");
    for (int i = 0; i < m; ++i) x[i] = es.eigenvalues()(i);
  }

  // Newton on h_m, h_m' = sqrt(2m) h_{m-1} - x h_m; scale factors cancel.
  auto polish = [m](double z) {
    for (int it = 0; it < 6; ++it) {
      double hm = 0, hm1 = 0;
      int em = 0, em1 = 0;
      run_recurrence(m, z, [&](int k, double u, int e) {
        if (k == m - 1) { hm1 = u; em1 = e; }
        if (k == m) { hm = u; em = e; }
      });
      hm1 = std::ldexp(hm1, em1 - em);
      double d = std::sqrt(2.0 * m) * hm1 - z * hm;
      if (d == 0) break;
      double step = hm / d;
      z -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    return z;
  };

  QuadratureRule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  r.log_raw_weights.resize(m);
  int half = m / 2;
  for (int i = 0; i < half; ++i) {
    double z = polish(std::abs(x[m - 1 - i]));
    r.nodes[m - 1 - i] = z;
    r.nodes[i] = -z;
  }
  if (m % 2 == 1) r.nodes[half] = 0.0;

  for (int i = 0; i < m; ++i) {
    double z = r.nodes[i];
    if (i < half) {
      continue;
    }
    double sum = 0.0;
    int e_ref = 0;
    bool first = true;
    run_recurrence(m - 1, z, [&](int, double u, int e) {
      if (first) { e_ref = e; first = false; }
      if (e != e_ref) {
        sum = std::ldexp(sum, 2 * (e_ref - e));
        e_ref = e;
      }
      sum += u * u;
    });
    double log_sum = std::log(sum) + 2.0 * e_ref * std::numbers::ln2;
    r.weights[i] = std::exp(-log_sum);
    r.log_raw_weights[i] = -log_sum - z * z;
    r.weights[m - 1 - i] = r.weights[i];
    r.log_raw_weights[m - 1 - i] = r.log_raw_weights[i];
  }
  return r;
}

std::size_t TensorGrid::size() const
{
  std::size_t s = 1;
  for (const auto& a : axes) s *= a.size();
  return s;
}

std::vector<std::size_t> TensorGrid::shape() const
{
  std::vector<std::size_t> s;
  for (const auto& a : axes) s.push_back(a.size());
  return s;
}

std::size_t TensorGrid::flat_index(std::span<const std::size_t> multi) const
{
  std::size_t f = 0;
  for (int d = 0; d < dim; ++d) f = f * axes[d].size() + multi[d];
  return f;
}

std::vector<std::size_t> TensorGrid::multi_index(std::size_t flat) const
{
  std::vector<std::size_t> m(dim);
  for (int d = dim - 1; d >= 0; --d) {
    m[d] = flat % axes[d].size();
    flat /= axes[d].size();
  }
  return m;
}

std::vector<double> TensorGrid::point(std::size_t flat) const
{
  auto m = multi_index(flat);
  std::vector<double> p(dim);
  for (int d = 0; d < dim; ++d) p[d] = axes[d][m[d]];
  return p;
}

double TensorGrid::measure(std::size_t flat) const
{
  auto m = multi_index(flat);
  double w = 1.0;
  for (int d = 0; d < dim; ++d) w *= axis_measures[d][m[d]];
  return w;
}

std::vector<double> TensorGrid::measures() const
{
  std::vector<double> w{1.0};
  for (int d = 0; d < dim; ++d) {
    std::vector<double> next;
    next.reserve(w.size() * axes[d].size());
    for (double a : w)
      for (double b : axis_measures[d]) next.push_back(a * b);
    w.swap(next);
  }
  return w;
}

TensorGrid gauss_hermite_grid(int dim, int nodes_per_axis)
{
  if (dim < 1) throw ConfigError("gauss_hermite_grid: dim must be >= 1");
  auto rule = gauss_hermite_rule(nodes_per_axis);
  TensorGrid g;
  g.kind = GridKind::GaussHermite;
  g.dim = dim;
  g.axes.assign(dim, rule.nodes);
  g.axis_measures.assign(dim, rule.weights);
  return g;
}

TensorGrid uniform_grid(int dim, double lower, double upper, int cells_per_axis)
{
  if (dim < 1) throw ConfigError("uniform_grid: dim must be >= 1");
  if (!(upper > lower) || cells_per_axis < 1) throw ConfigError("uniform_grid: empty box");
  double h = (upper - lower) / cells_per_axis;
  std::vector<double> centers(cells_per_axis), edges(cells_per_axis + 1), meas(cells_per_axis, h);
  for (int i = 0; i <= cells_per_axis; ++i) edges[i] = lower + i * h;
  edges.back() = upper;
  for (int i = 0; i < cells_per_axis; ++i) centers[i] = 0.5 * (edges[i] + edges[i + 1]);
  TensorGrid g;
  g.kind = GridKind::Uniform;
  g.dim = dim;
  g.axes.assign(dim, centers);
  g.axis_measures.assign(dim, meas);
  g.axis_edges.assign(dim, edges);
  return g;
}

}  // namespace hermite_riesz
