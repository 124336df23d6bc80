#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hermite_riesz/hermite_basis.hpp"

namespace hermite_riesz {

/// Hermite coefficients c_alpha = (f, h_alpha), stored shell by shell.
struct CoeffRep
{
  int dim = 0;
  int K = 0;
  std::vector<std::vector<double>> shells;

  static CoeffRep zeros(int dim, int K);
  std::vector<double>& shell(int k) { return shells.at(k); }
  const std::vector<double>& shell(int k) const { return shells.at(k); }
  double norm() const;
  double shell_norm2(int k) const;
  std::size_t total_size() const;
  /// Coefficient of alpha, zero if |alpha| > K.
  double at(std::span<const int> alpha) const;
  double& at(std::span<const int> alpha);
};

/// HRC1 coefficient file.
void save_coeffs(const std::string& path, const CoeffRep& c);
CoeffRep load_coeffs(const std::string& path);

struct GridFunction
{
  std::shared_ptr<const TensorGrid> grid;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(std::shared_ptr<const TensorGrid> g, std::vector<double> v);
  static GridFunction zeros(std::shared_ptr<const TensorGrid> g);
};

struct Envelope
{
  double A;
  double N;
};

struct MultiplierSpec
{
  std::string name;
  std::function<double(double)> eval;
  bool is_even = true;
  std::optional<double> fourier_support_radius;
  std::optional<Envelope> envelope;

  double operator()(double lambda) const { return eval(is_even ? std::abs(lambda) : lambda); }
};

/// Coefficients by quadrature. Gauss-Hermite grids use the adapted weights and
/// need at least K+1 nodes per axis. Uniform grids treat f as constant on each
/// cell and integrate h_k exactly over the cell.
CoeffRep analyze(const GridFunction& f, int K);

/// Per-axis analysis matrix A_d(k, i): the weight of sample i in (f, h_k).
RowMatrix analysis_matrix(const TensorGrid& grid, int axis, int K);

/// Exact integrals of h_0..h_K over [edges[i], edges[i+1]].
RowMatrix hermite_cell_integrals(int K, std::span<const double> edges);

GridFunction synthesize(const CoeffRep& c, std::shared_ptr<const TensorGrid> grid);

CoeffRep project_shell(const CoeffRep& c, int k);

/// Shell k scaled by F(sqrt(2k+n)).
CoeffRep apply_multiplier(const MultiplierSpec& F, const CoeffRep& c);

/// Multiplier values at sqrt(2k+n), k = 0..K.
std::vector<double> shell_multipliers(const MultiplierSpec& F, int dim, int K);

MultiplierSpec bochner_riesz_spec(double R, double delta);
MultiplierSpec heat_multiplier(double t);
MultiplierSpec resolvent_multiplier(double gamma);
MultiplierSpec shell_selector(int k, int dim);
MultiplierSpec constant_multiplier(double value);

struct CriticalIndex
{
  double delta;
  double gamma;
  bool in_range;  // 1 <= p <= 2n/(n+2)
};

CriticalIndex critical_index(int n, double p);

/// Phi_k(x,x) at each point (points given as rows of an N x n matrix).
std::vector<double> projection_kernel_diag(int k, const Eigen::MatrixXd& points);

/// Phi_0(x,x)..Phi_K(x,x) at one point, by shell convolution across axes.
std::vector<double> projection_diag_all_shells(int K, std::span<const double> x);

struct KernelOptions
{
  double max_tail_bound = 1e-6;
  bool accept_truncation = false;
};

struct KernelMatrix
{
  Eigen::MatrixXd values;
  int K = 0;
  double tail_bound = 0.0;
};

/// K_F(x, y) = sum_{k <= K} F(sqrt(2k+n)) Phi_k(x, y) on all pairs of points (rows).
KernelMatrix multiplier_kernel(const MultiplierSpec& F, const Eigen::MatrixXd& points, int K,
                               const KernelOptions& opt = {});

/// Sum_{k > K} |F(sqrt(2k+n))| sqrt(shell size) max_x sqrt(Phi_k(x,x)), with the sup
/// frozen at the value of the last computed shell. +inf when the terms do not decay.
double truncation_tail_bound(const MultiplierSpec& F, int dim, int K, double last_shell_sup);

double mehler_heat_kernel(double t, std::span<const double> x, std::span<const double> y);

/// Euclidean heat kernel (4 pi t)^{-n/2} exp(-|x-y|^2 / 4t).
double euclidean_heat_kernel(double t, std::span<const double> x, std::span<const double> y);

}  // namespace hermite_riesz
