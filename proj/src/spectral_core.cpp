#include "hermite_riesz/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/output.hpp"

namespace hermite_riesz {

CoeffRep CoeffRep::zeros(int dim, int K)
{
  if (dim < 1 || K < 0) throw ConfigError("CoeffRep: need dim >= 1 and K >= 0");
  CoeffRep c;
  c.dim = dim;
  c.K = K;
  c.shells.resize(K + 1);
  for (int k = 0; k <= K; ++k) c.shells[k].assign(shell_size(dim, k), 0.0);
  return c;
}

double CoeffRep::shell_norm2(int k) const
{
  double s = 0;
  for (double v : shells.at(k)) s += v * v;
  return s;
}

double CoeffRep::norm() const
{
  double s = 0;
  for (int k = 0; k <= K; ++k) s += shell_norm2(k);
  return std::sqrt(s);
}

std::size_t CoeffRep::total_size() const
{
  std::size_t s = 0;
  for (const auto& sh : shells) s += sh.size();
  return s;
}

double CoeffRep::at(std::span<const int> alpha) const
{
  int k = 0;
  for (int a : alpha) k += a;
  if (k > K) return 0.0;
  return shells[k][shell_offset(alpha)];
}

double& CoeffRep::at(std::span<const int> alpha)
{
  int k = 0;
  for (int a : alpha) k += a;
  if (k > K) throw ConfigError("CoeffRep::at: multi-index beyond K");
  return shells[k][shell_offset(alpha)];
}

void save_coeffs(const std::string& path, const CoeffRep& c)
{
  io::BinaryWriter w;
  w.magic("HRC1");
  w.u32(static_cast<std::uint32_t>(c.dim));
  w.u32(static_cast<std::uint32_t>(c.K));
  for (const auto& sh : c.shells)
    for (double v : sh) w.f64(v);
  io::atomic_write(path, w.bytes());
}

CoeffRep load_coeffs(const std::string& path)
{
  io::BinaryReader r(io::read_file(path), path);
  r.expect_magic("HRC1");
  auto dim = r.u32();
  auto K = r.u32();
  if (dim < 1 || dim > 16 || K > 100000) throw ConfigError(path + ": implausible HRC1 header");
  auto c = CoeffRep::zeros(static_cast<int>(dim), static_cast<int>(K));
  for (auto& sh : c.shells)
    for (double& v : sh) {
      v = r.f64();
      if (!std::isfinite(v)) throw ConfigError(path + ": non-finite coefficient");
    }
  if (!r.at_end()) throw ConfigError(path + ": trailing bytes after HRC1 payload");
  return c;
}

GridFunction::GridFunction(std::shared_ptr<const TensorGrid> g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v))
{
  if (!grid) throw ConfigError("GridFunction: null grid");
  if (values.size() != grid->size()) throw ConfigError("GridFunction: value count does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw NumericalError("GridFunction: non-finite value");
}

GridFunction GridFunction::zeros(std::shared_ptr<const TensorGrid> g)
{
  std::size_t n = g->size();
  return GridFunction(std::move(g), std::vector<double>(n, 0.0));
}

RowMatrix hermite_cell_integrals(int K, std::span<const double> edges)
{
  if (edges.size() < 2) throw ConfigError("hermite_cell_integrals: need at least one cell");
  auto he = hermite_eval_1d(K, edges);
  std::size_t ncell = edges.size() - 1;
  RowMatrix I(K + 1, static_cast<Eigen::Index>(ncell));
  const double c0 = std::pow(std::numbers::pi, -0.25) * std::sqrt(std::numbers::pi / 2.0);
  const double s = 1.0 / std::numbers::sqrt2;
  for (std::size_t i = 0; i < ncell; ++i) {
    double a = edges[i], b = edges[i + 1];
    double d;
    if (a >= 0) d = std::erfc(a * s) - std::erfc(b * s);
    else if (b <= 0) d = std::erfc(-b * s) - std::erfc(-a * s);
    else d = std::erf(b * s) - std::erf(a * s);
    auto col = static_cast<Eigen::Index>(i);
    I(0, col) = c0 * d;
    double prev = 0.0, cur = I(0, col);
    for (int k = 0; k < K; ++k) {
      double jump = he(k, i + 1) - he(k, i);
      double next = std::sqrt(double(k) / (k + 1)) * prev - std::sqrt(2.0 / (k + 1)) * jump;
      prev = cur;
      cur = next;
      I(k + 1, col) = cur;
    }
  }
  return I;
}

RowMatrix analysis_matrix(const TensorGrid& grid, int axis, int K)
{
  const auto& pts = grid.axes.at(axis);
  if (grid.kind == GridKind::Uniform) return hermite_cell_integrals(K, grid.axis_edges.at(axis));
  auto b = hermite_eval_1d(K, pts);
  const auto& w = grid.axis_measures.at(axis);
  for (Eigen::Index i = 0; i < b.values.cols(); ++i) b.values.col(i) *= w[i];
  return b.values;
}

namespace {

// Contract axis d of a dense row-major tensor (shape) with M (rows x shape[d]).
std::vector<double> contract(const std::vector<double>& T, std::vector<std::size_t>& shape, int d,
                             const RowMatrix& M)
{
  std::size_t pre = 1, post = 1;
  for (int i = 0; i < d; ++i) pre *= shape[i];
  for (std::size_t i = d + 1; i < shape.size(); ++i) post *= shape[i];
  std::size_t mid = shape[d];
  std::size_t out_mid = static_cast<std::size_t>(M.rows());
  std::vector<double> R(pre * out_mid * post);
  using Map = Eigen::Map<const RowMatrix>;
  using MapOut = Eigen::Map<RowMatrix>;
  for (std::size_t p = 0; p < pre; ++p) {
    Map in(T.data() + p * mid * post, static_cast<Eigen::Index>(mid), static_cast<Eigen::Index>(post));
    MapOut out(R.data() + p * out_mid * post, static_cast<Eigen::Index>(out_mid),
               static_cast<Eigen::Index>(post));
    out.noalias() = M * in;
  }
  shape[d] = out_mid;
  return R;
}

template <class F>
void for_each_index(int n, int K, F&& f)
{
  for (int k = 0; k <= K; ++k) {
    auto sh = enumerate_shell(n, k);
    for (std::size_t j = 0; j < sh.size(); ++j) f(k, j, sh[j]);
  }
}

std::size_t dense_index(const std::vector<int>& alpha, int K)
{
  std::size_t idx = 0;
  for (int a : alpha) idx = idx * static_cast<std::size_t>(K + 1) + static_cast<std::size_t>(a);
  return idx;
}

}  // namespace

CoeffRep analyze(const GridFunction& f, int K)
{
  const TensorGrid& g = *f.grid;
  if (K < 0) throw ConfigError("analyze: K must be >= 0");
  if (g.kind == GridKind::GaussHermite)
    for (int d = 0; d < g.dim; ++d)
      if (static_cast<int>(g.axes[d].size()) < K + 1)
        throw NumericalError("analyze: Gauss-Hermite grid has " + std::to_string(g.axes[d].size()) +
                             " nodes on axis " + std::to_string(d) + ", K=" + std::to_string(K) +
                             " needs at least " + std::to_string(K + 1));
  auto shape = g.shape();
  std::vector<double> T = f.values;
  for (int d = 0; d < g.dim; ++d) T = contract(T, shape, d, analysis_matrix(g, d, K));
  auto c = CoeffRep::zeros(g.dim, K);
  for_each_index(g.dim, K, [&](int k, std::size_t j, const std::vector<int>& a) {
    c.shells[k][j] = T[dense_index(a, K)];
  });
  return c;
}

GridFunction synthesize(const CoeffRep& c, std::shared_ptr<const TensorGrid> grid)
{
  if (!grid || grid->dim != c.dim) throw ConfigError("synthesize: grid dimension mismatch");
  std::size_t side = static_cast<std::size_t>(c.K + 1);
  std::vector<std::size_t> shape(c.dim, side);
  std::size_t total = 1;
  for (int d = 0; d < c.dim; ++d) total *= side;
  std::vector<double> T(total, 0.0);
  for_each_index(c.dim, c.K, [&](int k, std::size_t j, const std::vector<int>& a) {
    T[dense_index(a, c.K)] = c.shells[k][j];
  });
  for (int d = 0; d < c.dim; ++d) {
    auto b = hermite_eval_1d(c.K, grid->axes[d]);
    RowMatrix Vt = b.values.transpose();
    T = contract(T, shape, d, Vt);
  }
  return GridFunction(std::move(grid), std::move(T));
}

CoeffRep project_shell(const CoeffRep& c, int k)
{
  if (k < 0 || k > c.K) throw ConfigError("project_shell: k outside [0, K]");
  auto r = CoeffRep::zeros(c.dim, c.K);
  r.shells[k] = c.shells[k];
  return r;
}

std::vector<double> shell_multipliers(const MultiplierSpec& F, int dim, int K)
{
  std::vector<double> m(K + 1);
  for (int k = 0; k <= K; ++k) {
    m[k] = F(std::sqrt(2.0 * k + dim));
    if (!std::isfinite(m[k]))
      throw NumericalError("multiplier " + F.name + " is not finite on shell " + std::to_string(k));
  }
  return m;
}

CoeffRep apply_multiplier(const MultiplierSpec& F, const CoeffRep& c)
{
  auto m = shell_multipliers(F, c.dim, c.K);
  CoeffRep r = c;
  for (int k = 0; k <= c.K; ++k)
    for (double& v : r.shells[k]) v *= m[k];
  return r;
}

std::vector<double> projection_diag_all_shells(int K, std::span<const double> x)
{
  int n = static_cast<int>(x.size());
  if (n < 1) throw ConfigError("projection_diag: empty point");
  std::vector<double> acc;
  for (int d = 0; d < n; ++d) {
    auto h = hermite_values(K, x[d]);
    for (double& v : h) v *= v;
    if (d == 0) {
      acc = std::move(h);
      continue;
    }
    std::vector<double> next(K + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
      double s = 0;
      for (int a = 0; a <= k; ++a) s += acc[a] * h[k - a];
      next[k] = s;
    }
    acc.swap(next);
  }
  return acc;
}

std::vector<double> projection_kernel_diag(int k, const Eigen::MatrixXd& points)
{
  if (k < 0) throw ConfigError("projection_kernel_diag: k must be >= 0");
  std::vector<double> out(points.rows());
  std::vector<double> x(points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index d = 0; d < points.cols(); ++d) x[d] = points(i, d);
    out[i] = projection_diag_all_shells(k, x)[k];
  }
  return out;
}

double truncation_tail_bound(const MultiplierSpec& F, int dim, int K, double last_shell_sup)
{
  double sum = 0.0, first = 0.0, last = 0.0;
  int kmax = K + 64 * (K + 1) + 1000;
  for (int k = K + 1; k <= kmax; ++k) {
    double f = std::abs(F(std::sqrt(2.0 * k + dim)));
    if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();
    double term = f * std::sqrt(static_cast<double>(shell_size(dim, k))) * last_shell_sup;
    if (k == K + 1) first = term;
    last = term;
    sum += term;
    if (k > K + 8 && term <= 1e-17 * sum) return sum;
  }
  if (last > 1e-3 * first) return std::numeric_limits<double>::infinity();
  return sum;
}

KernelMatrix multiplier_kernel(const MultiplierSpec& F, const Eigen::MatrixXd& points, int K,
                               const KernelOptions& opt)
{
  int n = static_cast<int>(points.cols());
  Eigen::Index N = points.rows();
  if (n < 1 || N < 1) throw ConfigError("multiplier_kernel: empty point set");
  auto m = shell_multipliers(F, n, K);

  std::vector<Basis1D> b1;
  for (int d = 0; d < n; ++d) {
    std::vector<double> col(points.col(d).data(), points.col(d).data() + N);
    b1.push_back(hermite_eval_1d(K, col));
  }
  std::size_t ncols = 0;
  for (int k = 0; k <= K; ++k) ncols += shell_size(n, k);
  Eigen::MatrixXd Phi(N, static_cast<Eigen::Index>(ncols));
  Eigen::VectorXd w(static_cast<Eigen::Index>(ncols));
  Eigen::VectorXd last_diag = Eigen::VectorXd::Zero(N);
  Eigen::Index col = 0;
  for (int k = 0; k <= K; ++k)
    for (const auto& a : enumerate_shell(n, k)) {
      for (Eigen::Index i = 0; i < N; ++i) {
        double v = 1.0;
        for (int d = 0; d < n; ++d) v *= b1[d](a[d], static_cast<std::size_t>(i));
        Phi(i, col) = v;
        if (k == K) last_diag(i) += v * v;
      }
      w(col) = m[k];
      ++col;
    }
  KernelMatrix km;
  km.K = K;
  km.values.noalias() = Phi * w.asDiagonal() * Phi.transpose();
  km.tail_bound = truncation_tail_bound(F, n, K, std::sqrt(last_diag.maxCoeff()));
  if (!opt.accept_truncation && !(km.tail_bound <= opt.max_tail_bound))
    throw NumericalError("multiplier_kernel: truncation at K=" + std::to_string(K) + " for " + F.name +
                         " leaves tail bound " + io::format_double(km.tail_bound) + " > " +
                         io::format_double(opt.max_tail_bound));
  return km;
}

}  // namespace hermite_riesz
