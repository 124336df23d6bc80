#include <algorithm>
#include <cmath>
#include <numbers>

#include <lapacke.h>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/output.hpp"
#include "hermite_riesz/potentials.hpp"

namespace hermite_riesz {

namespace {

double norm2(std::span<const double> x)
{
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

Eigen::MatrixXd kinetic_1d(int m, double h, LaplacianScheme scheme)
{
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  if (scheme == LaplacianScheme::SecondOrder) {
    for (int i = 0; i < m; ++i) {
      T(i, i) = 2.0 / (h * h);
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = -1.0 / (h * h);
    }
    return T;
  }
  // sine basis on [0, L], L = (m+1) h
  double L = (m + 1) * h;
  Eigen::MatrixXd S(m, m);
  double c = std::sqrt(2.0 / (m + 1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) S(i, j) = c * std::sin(std::numbers::pi * (i + 1) * (j + 1) / (m + 1));
  Eigen::VectorXd k2(m);
  for (int j = 0; j < m; ++j) k2(j) = std::pow(std::numbers::pi * (j + 1) / L, 2);
  T = S * k2.asDiagonal() * S.transpose();
  return 0.5 * (T + T.transpose());
}

}  // namespace

std::string to_string(LaplacianScheme s)
{
  return s == LaplacianScheme::SineDVR ? "sine-dvr" : "second-order";
}

PotentialSpec harmonic_potential()
{
  return {"harmonic", [](std::span<const double> x) { return norm2(x); }, PotentialBounds{}};
}

PotentialSpec perturbed_harmonic_potential(double eps)
{
  PotentialBounds b;
  b.c1 = 1 - 2 * eps;
  b.c2 = 1 + 2 * eps;
  b.c3 = 1.0;
  b.c4 = 3.0;
  b.c5 = 2 + 300 * eps;
  return {"perturbed-harmonic(" + io::format_double(eps) + ")",
          [eps](std::span<const double> x) { return norm2(x) * (1 + eps * std::sin(x[0])); }, b};
}

PotentialSpec linear_potential()
{
  return {"linear", [](std::span<const double> x) { return std::sqrt(norm2(x)); }, PotentialBounds{}};
}

PotentialReport validate_potential(const PotentialSpec& spec, int dim, double A, int samples)
{
  if (dim < 1 || dim > 3) throw ConfigError("validate_potential: dim must be 1..3");
  if (samples < 2 || !(A > 0)) throw ConfigError("validate_potential: need A > 0 and at least 2 samples");
  PotentialReport r;
  r.core_radius = spec.declared.core_radius;
  r.ratio_min = r.grad_min = INFINITY;
  r.ratio_max = r.grad_max = -INFINITY;
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(samples);
  std::vector<double> x(dim), y(dim);
  const double hd = 1e-3;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int d = dim - 1; d >= 0; --d) {
      x[d] = -A + 2 * A * static_cast<double>(rem % samples) / (samples - 1);
      rem /= samples;
    }
    double v = spec.V(x);
    if (!std::isfinite(v)) {
      r.failures.push_back("V is not finite at a sample");
      return r;
    }
    ++r.samples;
    double rx = std::sqrt(norm2(x));
    // second difference quotients
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        auto at = [&](double si, double sj) {
          y = x;
          y[i] += si;
          y[j] += sj;
          return spec.V(y);
        };
        double q = i == j ? (at(hd, 0) - 2 * v + at(-hd, 0)) / (hd * hd)
                          : (at(hd, hd) - at(hd, -hd) - at(-hd, hd) + at(-hd, -hd)) / (4 * hd * hd);
        r.second_max = std::max(r.second_max, std::abs(q));
      }
    if (rx <= spec.declared.core_radius) continue;
    double ratio = v / (rx * rx);
    r.ratio_min = std::min(r.ratio_min, ratio);
    r.ratio_max = std::max(r.ratio_max, ratio);
    double g2 = 0, hg = 1e-6 * std::max(1.0, rx);
    for (int i = 0; i < dim; ++i) {
      y = x;
      y[i] += hg;
      double vp = spec.V(y);
      y[i] -= 2 * hg;
      double vm = spec.V(y);
      g2 += std::pow((vp - vm) / (2 * hg), 2);
    }
    double gr = std::sqrt(g2) / rx;
    r.grad_min = std::min(r.grad_min, gr);
    r.grad_max = std::max(r.grad_max, gr);
  }
  const auto& b = spec.declared;
  const double tol = 1e-6;
  auto fmt = io::format_double;
  if (r.ratio_min < b.c1 * (1 - tol) || r.ratio_max > b.c2 * (1 + tol))
    r.failures.push_back("V/|x|^2 in [" + fmt(r.ratio_min) + ", " + fmt(r.ratio_max) + "] outside [" + fmt(b.c1) +
                         ", " + fmt(b.c2) + "]");
  if (r.grad_min < b.c3 * (1 - tol) || r.grad_max > b.c4 * (1 + tol))
    r.failures.push_back("|grad V|/|x| in [" + fmt(r.grad_min) + ", " + fmt(r.grad_max) + "] outside [" +
                         fmt(b.c3) + ", " + fmt(b.c4) + "]");
  if (r.second_max > b.c5 + 1e-3)
    r.failures.push_back("sup |second differences| " + fmt(r.second_max) + " > " + fmt(b.c5));
  return r;
}

DiscreteOperator build_operator(const PotentialSpec& spec, int dim, double A, double h, LaplacianScheme scheme)
{
  if (dim != 1 && dim != 2) throw ConfigError("build_operator: dim must be 1 or 2");
  if (!(A > 0) || !(h > 0)) throw ConfigError("build_operator: need A > 0 and h > 0");
  double cells = 2 * A / h;
  int nc = static_cast<int>(std::lround(cells));
  if (std::abs(cells - nc) > 1e-9 * cells || nc < 2)
    throw ConfigError("build_operator: 2A/h must be an integer >= 2");
  DiscreteOperator op;
  op.dim = dim;
  op.A = A;
  op.h = h;
  op.m = nc - 1;
  op.scheme = scheme;
  op.potential = spec.name;
  std::size_t N = static_cast<std::size_t>(op.m);
  if (dim == 2) N *= static_cast<std::size_t>(op.m);
  if (N > 40000) throw ConfigError("build_operator: matrix dimension " + std::to_string(N) + " exceeds 40000");
  for (int i = 1; i <= op.m; ++i) op.axis.push_back(-A + i * h);
  Eigen::MatrixXd T = kinetic_1d(op.m, h, scheme);
  int m = op.m;
  if (dim == 1) {
    op.matrix = T;
    for (int i = 0; i < m; ++i) {
      double x[1] = {op.axis[i]};
      op.matrix(i, i) += spec.V(x);
    }
  } else {
    op.matrix = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Eigen::Index row = i * m + j;
        for (int k = 0; k < m; ++k) {
          op.matrix(row, k * m + j) += T(i, k);
          op.matrix(row, i * m + k) += T(j, k);
        }
        double x[2] = {op.axis[i], op.axis[j]};
        op.matrix(row, row) += spec.V(x);
      }
  }
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i)
    if (!std::isfinite(op.matrix(i, i))) throw NumericalError("build_operator: V is not finite on the mesh");
  return op;
}

std::vector<double> EigenDecomp::axis() const
{
  std::vector<double> a;
  for (int i = 1; i <= m; ++i) a.push_back(-A + i * h);
  return a;
}

double EigenDecomp::cell_measure() const { return std::pow(h, dim); }

double spectral_ceiling(double h, double factor) { return factor * std::pow(std::numbers::pi / h, 2); }

EigenDecomp eigensolve(const DiscreteOperator& op, int count, double ceiling_factor)
{
  lapack_int N = static_cast<lapack_int>(op.size());
  if (count < 1 || count > N)
    throw ConfigError("eigensolve: count " + std::to_string(count) + " not in [1, " + std::to_string(N) + "]");
  Eigen::MatrixXd a = op.matrix;
  Eigen::VectorXd w(N);
  Eigen::MatrixXd z(N, count);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', N, a.data(), N, 0.0, 0.0, 1, count, 0.0, &found,
                                   w.data(), z.data(), N, isuppz.data());
  if (info != 0) throw NumericalError("eigensolve: dsyevr failed with info " + std::to_string(info));

  EigenDecomp d;
  d.dim = op.dim;
  d.m = op.m;
  d.h = op.h;
  d.A = op.A;
  d.ceiling = spectral_ceiling(op.h, ceiling_factor);
  int keep = 0;
  while (keep < found && w(keep) <= d.ceiling) ++keep;
  if (keep < count)
    d.warnings.push_back("eigensolve: kept " + std::to_string(keep) + " of " + std::to_string(count) +
                         " modes below the ceiling " + io::format_double(d.ceiling));
  double top = keep > 0 ? w(keep - 1) : 0.0;
  if (op.A < std::sqrt(std::max(top, 0.0)) + 4)
    d.warnings.push_back("eigensolve: box half-width " + io::format_double(op.A) +
                         " is within 4 of the turning point of the top retained mode");
  d.eigenvalues = w.head(keep);
  d.vectors = z.leftCols(keep) / std::sqrt(d.cell_measure());
  // sign: largest entry positive
  for (int j = 0; j < keep; ++j) {
    Eigen::Index at = 0;
    d.vectors.col(j).cwiseAbs().maxCoeff(&at);
    if (d.vectors(at, j) < 0) d.vectors.col(j) *= -1.0;
  }
  return d;
}

namespace {

void check_band(const EigenDecomp& d, double hi)
{
  if (hi > d.ceiling)
    throw NumericalError("band top " + io::format_double(hi) + " exceeds the reliable ceiling " +
                         io::format_double(d.ceiling));
  if (d.count() == 0 || d.eigenvalues(d.count() - 1) < hi)
    throw NumericalError("band top " + io::format_double(hi) + " is above the highest retained eigenvalue");
}

}  // namespace

BandReport band_projector_constant(const EigenDecomp& d, double lambda, double p)
{
  if (p != 1.0) throw ConfigError("band_projector_constant: only p = 1 is exact");
  if (!(lambda >= 0)) throw ConfigError("band_projector_constant: lambda must be >= 0");
  BandReport r;
  r.lo = lambda * lambda;
  r.hi = r.lo + 1;
  check_band(d, r.hi);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(d.size());
  for (int j = 0; j < d.count(); ++j)
    if (d.eigenvalues(j) >= r.lo && d.eigenvalues(j) < r.hi) {
      diag += d.vectors.col(j).cwiseAbs2();
      ++r.modes;
    }
  r.empty = r.modes == 0;
  r.norm.value = r.empty ? 0.0 : std::sqrt(diag.maxCoeff());
  r.norm.method = NormMethod::ExactKernel;
  r.norm.description = "sup over mesh of the band kernel diagonal, " + std::to_string(r.modes) + " modes";
  return r;
}

SweepResult band_projector_sweep(const EigenDecomp& d, const std::vector<double>& lambdas, double p)
{
  SweepResult s;
  s.axis_name = "lambda";
  s.reference_exponent = d.dim * (1 / p - 0.5) - 1;
  for (double l : lambdas) {
    auto b = band_projector_constant(d, l, p);
    if (b.empty) continue;
    s.axis.push_back(l);
    s.values.push_back(b.norm.value);
    s.ratios.push_back(b.norm.value / std::pow(1 + l, s.reference_exponent));
  }
  if (!s.ratios.empty()) s.fitted_constant = *std::max_element(s.ratios.begin(), s.ratios.end());
  return s;
}

Eigen::MatrixXd band_projector_matrix(const EigenDecomp& d, double lo, double hi)
{
  check_band(d, hi);
  std::vector<int> cols;
  for (int j = 0; j < d.count(); ++j)
    if (d.eigenvalues(j) >= lo && d.eigenvalues(j) < hi) cols.push_back(j);
  Eigen::MatrixXd B(d.size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) B.col(c) = d.vectors.col(cols[c]);
  return B * B.transpose() * d.cell_measure();
}

std::vector<double> br_means_V(const EigenDecomp& d, std::span<const double> f, double R, double delta)
{
  if (f.size() != d.size()) throw ConfigError("br_means_V: function size does not match the mesh");
  if (!(R > 0) || !(delta >= 0)) throw ConfigError("br_means_V: need R > 0 and delta >= 0");
  if (R * R > d.ceiling)
    throw NumericalError("br_means_V: R^2 = " + io::format_double(R * R) + " exceeds the reliable ceiling " +
                         io::format_double(d.ceiling));
  Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  Eigen::VectorXd c = d.vectors.transpose() * fv * d.cell_measure();
  for (int j = 0; j < d.count(); ++j) {
    double t = 1 - d.eigenvalues(j) / (R * R);
    c(j) *= t > 0 ? (delta == 0 ? 1.0 : std::pow(t, delta)) : 0.0;
  }
  Eigen::VectorXd out = d.vectors * c;
  return {out.data(), out.data() + out.size()};
}

std::vector<double> eigenvalue_convergence_order(const PotentialSpec& spec, int dim, double A, double h, int modes,
                                                 LaplacianScheme scheme)
{
  std::vector<Eigen::VectorXd> ev;
  for (double hh : {h, h / 2, h / 4}) {
    auto d = eigensolve(build_operator(spec, dim, A, hh, scheme), modes);
    if (d.count() < modes) throw NumericalError("eigenvalue_convergence_order: modes above the ceiling at h");
    ev.push_back(d.eigenvalues);
  }
  std::vector<double> order(modes);
  for (int j = 0; j < modes; ++j)
    order[j] = std::log2(std::abs(ev[0](j) - ev[1](j)) / std::abs(ev[1](j) - ev[2](j)));
  return order;
}

void save_eigendecomp(const std::string& path, const EigenDecomp& d)
{
  io::BinaryWriter w;
  w.magic("HVE1");
  w.u32(static_cast<std::uint32_t>(d.dim));
  for (int i = 0; i < d.dim; ++i) w.u32(static_cast<std::uint32_t>(d.m));
  w.f64(d.h);
  w.u32(static_cast<std::uint32_t>(d.count()));
  for (int j = 0; j < d.count(); ++j) w.f64(d.eigenvalues(j));
  for (int j = 0; j < d.count(); ++j)
    for (Eigen::Index i = 0; i < d.vectors.rows(); ++i) w.f64(d.vectors(i, j));
  io::atomic_write(path, w.bytes());
}

EigenDecomp load_eigendecomp(const std::string& path)
{
  io::BinaryReader r(io::read_file(path), path);
  r.expect_magic("HVE1");
  EigenDecomp d;
  d.dim = static_cast<int>(r.u32());
  if (d.dim != 1 && d.dim != 2) throw ConfigError(path + ": HVE1 dimension must be 1 or 2");
  std::uint32_t m = r.u32();
  if (d.dim == 2 && r.u32() != m) throw ConfigError(path + ": HVE1 grid must be square");
  if (m < 1 || m > 40000) throw ConfigError(path + ": implausible HVE1 grid size");
  d.m = static_cast<int>(m);
  d.h = r.f64();
  if (!(d.h > 0)) throw ConfigError(path + ": HVE1 mesh width must be positive");
  d.A = (d.m + 1) * d.h / 2;
  d.ceiling = spectral_ceiling(d.h);
  std::uint32_t count = r.u32();
  std::size_t N = d.dim == 1 ? m : static_cast<std::size_t>(m) * m;
  if (count > N) throw ConfigError(path + ": HVE1 count exceeds the mesh size");
  d.eigenvalues.resize(count);
  for (auto& v : d.eigenvalues) v = r.f64();
  d.vectors.resize(static_cast<Eigen::Index>(N), count);
  for (std::uint32_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < N; ++i) d.vectors(static_cast<Eigen::Index>(i), j) = r.f64();
  if (!r.at_end()) throw ConfigError(path + ": trailing bytes after HVE1 payload");
  if (!d.eigenvalues.allFinite() || !d.vectors.allFinite()) throw ConfigError(path + ": non-finite HVE1 data");
  return d;
}

}  // namespace hermite_riesz
