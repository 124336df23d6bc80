#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hermite_riesz {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kMaxQuadratureNodes = 2000;

/// Values of h_0..h_k_max at a list of points; row k, column i.
struct Basis1D
{
  int k_max = 0;
  std::vector<double> points;
  RowMatrix values;

  double operator()(int k, std::size_t i) const { return values(k, static_cast<Eigen::Index>(i)); }
};

Basis1D hermite_eval_1d(int k_max, std::span<const double> points);

/// Single point, returns h_0(x)..h_k_max(x).
std::vector<double> hermite_values(int k_max, double x);

/// All multi-indices of total degree k in dimension n, lexicographic.
std::vector<std::vector<int>> enumerate_shell(int n, int k);

/// Number of multi-indices of degree k in dimension n.
std::size_t shell_size(int n, int k);

/// Position of alpha inside enumerate_shell(n, |alpha|).
std::size_t shell_offset(std::span<const int> alpha);

struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;          // adapted: w_i e^{x_i^2}
  std::vector<double> log_raw_weights;  // log w_i

  double raw_weight(std::size_t i) const;
};

QuadratureRule gauss_hermite_rule(int m);

enum class GridKind { GaussHermite, Uniform };

/// Tensor product of 1D axes, flat index = sum_d i_d * stride_d, axis 0 slowest.
struct TensorGrid
{
  GridKind kind = GridKind::GaussHermite;
  int dim = 0;
  std::vector<std::vector<double>> axes;
  std::vector<std::vector<double>> axis_measures;
  // Uniform grids only: cell edges per axis.
  std::vector<std::vector<double>> axis_edges;

  std::size_t size() const;
  std::vector<std::size_t> shape() const;
  std::size_t flat_index(std::span<const std::size_t> multi) const;
  std::vector<std::size_t> multi_index(std::size_t flat) const;
  std::vector<double> point(std::size_t flat) const;
  double measure(std::size_t flat) const;
  std::vector<double> measures() const;
};

TensorGrid gauss_hermite_grid(int dim, int nodes_per_axis);
TensorGrid uniform_grid(int dim, double lower, double upper, int cells_per_axis);

/// HRB1 basis cache. Written atomically.
void save_basis(const std::string& path, int dim, const Basis1D& basis);
Basis1D load_basis(const std::string& path, int* dim = nullptr);

}  // namespace hermite_riesz
