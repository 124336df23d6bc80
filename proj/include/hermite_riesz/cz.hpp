#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hermite_riesz/spectral_core.hpp"

namespace hermite_riesz {

struct DyadicCube
{
  int level = 0;
  std::vector<long> index;
  std::vector<double> center;
  double side = 0.0;

  double volume() const;
};

struct CZPart
{
  DyadicCube cube;
  std::vector<double> ball_center;
  double ball_radius = 0.0;  // sqrt(n)/2 * side
  std::vector<std::size_t> cells;
  std::vector<double> values;  // f on those cells
  double mass_p = 0.0;         // int |b_j|^p

  double ball_volume() const;
};

struct CZConstants
{
  double g_inf_over_alpha = 0.0;
  double g_p_over_f_p = 0.0;
  double iv_max = 0.0;          // max_j int|b_j|^p / (alpha^p |B_j|)
  double cube_sum_ratio = 0.0;  // sum |Q_j| / (alpha^{-p} ||f||_p^p)
  double ball_sum_ratio = 0.0;  // sum |B_j| / (alpha^{-p} ||f||_p^p)
  int overlap = 0;              // max_x #{j : x in 4 B_j}
};

struct CZOutput
{
  GridFunction g;
  std::vector<CZPart> parts;
  double alpha = 0.0;
  double p = 1.0;
  int levels = 0;  // finest level J, 2^J cells per axis
  CZConstants constants;
  double boundary_fraction = 0.0;  // max|f| on boundary cells / max|f|
  std::vector<std::string> warnings;

  GridFunction part_function(std::size_t j) const;
};

/// The bounds each measured constant is checked against.
struct CZBounds
{
  double g_inf_over_alpha;  // 2^{n/p}
  double g_p_over_f_p;      // 1
  double iv;                // 2^n / (omega_n (sqrt(n)/2)^n)
  double cube_sum;          // 1
  double ball_sum;          // omega_n (sqrt(n)/2)^n
  int overlap;              // (floor(4 sqrt n) + 1)^n (J + 1)
};

CZBounds cz_bounds(int n, double p, int levels);

CZOutput cz_decompose(const GridFunction& f, double alpha, double p);

struct CZReport
{
  double reconstruction_error = 0.0;
  bool disjoint = true;
  CZConstants measured;
  CZBounds bounds{};
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

CZReport verify_cz(const CZOutput& out, const GridFunction& f);

/// Per grid cell, the number of parts whose ball dilated by `dilation` contains the cell center.
std::vector<int> ball_cover_counts(const CZOutput& out, double dilation);

/// k with 2^k/R <= r < 2^{k+1}/R.
int radius_group(double r, double R);

std::map<int, std::vector<std::size_t>> partition_by_radius(const CZOutput& out, double R);

double unit_ball_volume(int n);

}  // namespace hermite_riesz
