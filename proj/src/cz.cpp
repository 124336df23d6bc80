#include "hermite_riesz/cz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/output.hpp"

namespace hermite_riesz {

double unit_ball_volume(int n) { return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }

double DyadicCube::volume() const { return std::pow(side, static_cast<double>(index.size())); }

double CZPart::ball_volume() const
{
  int n = static_cast<int>(ball_center.size());
  return unit_ball_volume(n) * std::pow(ball_radius, n);
}

GridFunction CZOutput::part_function(std::size_t j) const
{
  const auto& part = parts.at(j);
  std::vector<double> v(g.values.size(), 0.0);
  for (std::size_t i = 0; i < part.cells.size(); ++i) v[part.cells[i]] = part.values[i];
  return GridFunction(g.grid, std::move(v));
}

CZBounds cz_bounds(int n, double p, int levels)
{
  double circ = unit_ball_volume(n) * std::pow(std::sqrt(double(n)) / 2.0, n);
  CZBounds b;
  b.g_inf_over_alpha = std::pow(2.0, n / p);
  b.g_p_over_f_p = 1.0;
  b.iv = std::pow(2.0, n) / circ;
  b.cube_sum = 1.0;
  b.ball_sum = circ;
  int per_axis = static_cast<int>(std::floor(4.0 * std::sqrt(double(n)))) + 1;
  int per_level = 1;
  for (int d = 0; d < n; ++d) per_level *= per_axis;
  b.overlap = per_level * (levels + 1);
  return b;
}

namespace {

struct Layout
{
  int n;
  int J;
  double lower;
  double cell;
};

Layout check_grid(const TensorGrid& g)
{
  if (g.kind != GridKind::Uniform) throw ConfigError("cz_decompose: needs a uniform grid");
  std::size_t m = g.axes[0].size();
  int J = 0;
  while ((std::size_t{1} << J) < m) ++J;
  if ((std::size_t{1} << J) != m) throw ConfigError("cz_decompose: cells per axis must be a power of 2");
  for (int d = 1; d < g.dim; ++d)
    if (g.axis_edges[d] != g.axis_edges[0]) throw ConfigError("cz_decompose: box must be a cube");
  return {g.dim, J, g.axis_edges[0].front(), g.axis_edges[0][1] - g.axis_edges[0][0]};
}

double powp(double v, double p) { return p == 1.0 ? std::abs(v) : std::pow(std::abs(v), p); }

std::size_t level_flat(const std::vector<long>& idx, int level)
{
  std::size_t f = 0, side = std::size_t{1} << level;
  for (long i : idx) f = f * side + static_cast<std::size_t>(i);
  return f;
}

double lp_norm_p(const GridFunction& f, double p)
{
  const auto w = f.grid->measures();
  double s = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += powp(f.values[i], p) * w[i];
  return s;
}

std::vector<int> cover_counts(const std::vector<CZPart>& parts, const TensorGrid& g, const Layout& L, double dilation)
{
  std::size_t m = std::size_t{1} << L.J;
  std::vector<int> count(g.size(), 0);
  std::vector<long> lo(L.n), hi(L.n), cur(L.n);
  for (const auto& part : parts) {
    double r4 = dilation * part.ball_radius;
    for (int d = 0; d < L.n; ++d) {
      lo[d] = std::max(0L, static_cast<long>(std::floor((part.ball_center[d] - r4 - L.lower) / L.cell)) - 1);
      hi[d] = std::min(static_cast<long>(m) - 1, static_cast<long>(std::ceil((part.ball_center[d] + r4 - L.lower) / L.cell)) + 1);
      if (lo[d] > hi[d]) goto next_part;
    }
    cur = lo;
    while (true) {
      double d2 = 0;
      for (int d = 0; d < L.n; ++d) {
        double x = g.axes[d][cur[d]] - part.ball_center[d];
        d2 += x * x;
      }
      if (d2 <= r4 * r4) {
        std::size_t f = 0;
        for (int d = 0; d < L.n; ++d) f = f * m + static_cast<std::size_t>(cur[d]);
        ++count[f];
      }
      int d = L.n - 1;
      while (d >= 0 && cur[d] == hi[d]) {
        cur[d] = lo[d];
        --d;
      }
      if (d < 0) break;
      ++cur[d];
    }
  next_part:;
  }
  return count;
}

int overlap_count(const std::vector<CZPart>& parts, const TensorGrid& g, const Layout& L)
{
  auto count = cover_counts(parts, g, L, 4.0);
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

CZConstants measure_constants(const CZOutput& out, const GridFunction& f, const Layout& L)
{
  CZConstants c;
  double fpp = lp_norm_p(f, out.p);
  double gmax = 0;
  for (double v : out.g.values) gmax = std::max(gmax, std::abs(v));
  c.g_inf_over_alpha = gmax / out.alpha;
  c.g_p_over_f_p = fpp > 0 ? std::pow(lp_norm_p(out.g, out.p) / fpp, 1.0 / out.p) : 0.0;
  double ap = std::pow(out.alpha, out.p);
  double cubes = 0, balls = 0;
  for (const auto& part : out.parts) {
    c.iv_max = std::max(c.iv_max, part.mass_p / (ap * part.ball_volume()));
    cubes += part.cube.volume();
    balls += part.ball_volume();
  }
  double budget = fpp / ap;
  c.cube_sum_ratio = budget > 0 ? cubes / budget : 0.0;
  c.ball_sum_ratio = budget > 0 ? balls / budget : 0.0;
  c.overlap = overlap_count(out.parts, *f.grid, L);
  return c;
}

}  // namespace

CZOutput cz_decompose(const GridFunction& f, double alpha, double p)
{
  if (!(alpha > 0)) throw ConfigError("cz_decompose: alpha must be > 0");
  if (!(p >= 1)) throw ConfigError("cz_decompose: p must be >= 1");
  const TensorGrid& g = *f.grid;
  Layout L = check_grid(g);
  int n = L.n, J = L.J;
  std::size_t m = std::size_t{1} << J;
  double cellvol = std::pow(L.cell, n);

  // masses of |f|^p per dyadic level
  std::vector<std::vector<double>> mass(J + 1);
  mass[J].resize(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) mass[J][i] = powp(f.values[i], p) * cellvol;
  for (int l = J - 1; l >= 0; --l) {
    std::size_t side = std::size_t{1} << l;
    std::size_t count = 1;
    for (int d = 0; d < n; ++d) count *= side;
    mass[l].assign(count, 0.0);
    std::size_t cside = side * 2;
    for (std::size_t c = 0; c < mass[l + 1].size(); ++c) {
      std::size_t rem = c, parent = 0, mul = 1;
      for (int d = n - 1; d >= 0; --d) {
        std::size_t ic = rem % cside;
        rem /= cside;
        parent += (ic / 2) * mul;
        mul *= side;
      }
      mass[l][parent] += mass[l + 1][c];
    }
  }

  CZOutput out;
  out.alpha = alpha;
  out.p = p;
  out.levels = J;
  double ap = std::pow(alpha, p);
  double box_side = L.cell * static_cast<double>(m);

  auto make_part = [&](int level, const std::vector<long>& idx) {
    CZPart part;
    part.cube.level = level;
    part.cube.index = idx;
    part.cube.side = box_side / static_cast<double>(std::size_t{1} << level);
    part.cube.center.resize(n);
    for (int d = 0; d < n; ++d) part.cube.center[d] = L.lower + (idx[d] + 0.5) * part.cube.side;
    part.ball_center = part.cube.center;
    part.ball_radius = std::sqrt(double(n)) / 2.0 * part.cube.side;
    part.mass_p = mass[level][level_flat(idx, level)];
    std::size_t span = std::size_t{1} << (J - level);
    std::vector<long> off(n, 0);
    while (true) {
      std::size_t flat = 0;
      for (int d = 0; d < n; ++d) flat = flat * m + static_cast<std::size_t>(idx[d]) * span + static_cast<std::size_t>(off[d]);
      part.cells.push_back(flat);
      part.values.push_back(f.values[flat]);
      int d = n - 1;
      while (d >= 0 && off[d] == static_cast<long>(span) - 1) {
        off[d] = 0;
        --d;
      }
      if (d < 0) break;
      ++off[d];
    }
    out.parts.push_back(std::move(part));
  };

  std::vector<long> root(n, 0);
  if (mass[0][0] / std::pow(box_side, n) > ap) {
    make_part(0, root);
    out.warnings.push_back("root cube selected: average of |f|^p over the whole box exceeds alpha^p");
  } else {
    // depth-first in lexicographic child order, so parts come out deterministically
    std::vector<std::pair<int, std::vector<long>>> stack{{0, root}};
    while (!stack.empty()) {
      auto [level, idx] = stack.back();
      stack.pop_back();
      if (level == J) continue;
      double vol = std::pow(box_side / static_cast<double>(std::size_t{1} << (level + 1)), n);
      std::vector<std::pair<int, std::vector<long>>> descend;
      for (int c = 0; c < (1 << n); ++c) {
        std::vector<long> child(n);
        for (int d = 0; d < n; ++d) child[d] = 2 * idx[d] + ((c >> (n - 1 - d)) & 1);
        double avg = mass[level + 1][level_flat(child, level + 1)] / vol;
        if (avg > ap) make_part(level + 1, child);
        else if (level + 1 < J && mass[level + 1][level_flat(child, level + 1)] > 0) descend.emplace_back(level + 1, child);
      }
      for (auto it = descend.rbegin(); it != descend.rend(); ++it) stack.push_back(std::move(*it));
    }
  }

  std::vector<double> gv = f.values;
  for (const auto& part : out.parts)
    for (std::size_t c : part.cells) gv[c] = 0.0;
  out.g = GridFunction(f.grid, std::move(gv));

  double fmax = 0, bmax = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    double a = std::abs(f.values[i]);
    fmax = std::max(fmax, a);
    auto mi = g.multi_index(i);
    bool boundary = false;
    for (int d = 0; d < n; ++d) boundary = boundary || mi[d] == 0 || mi[d] == m - 1;
    if (boundary) bmax = std::max(bmax, a);
  }
  out.boundary_fraction = fmax > 0 ? bmax / fmax : 0.0;
  if (out.boundary_fraction > 1e-6)
    out.warnings.push_back("f is not negligible at the box boundary (max ratio " + io::format_double(out.boundary_fraction) +
                           "); f is treated as 0 outside the box");
  out.constants = measure_constants(out, f, L);
  return out;
}

CZReport verify_cz(const CZOutput& out, const GridFunction& f)
{
  const TensorGrid& g = *f.grid;
  Layout L = check_grid(g);
  CZReport rep;
  rep.bounds = cz_bounds(L.n, out.p, out.levels);

  std::vector<double> sum = out.g.values;
  std::vector<int> owner(g.size(), 0);
  for (const auto& part : out.parts)
    for (std::size_t i = 0; i < part.cells.size(); ++i) {
      sum[part.cells[i]] += part.values[i];
      if (++owner[part.cells[i]] > 1) rep.disjoint = false;
    }
  for (std::size_t i = 0; i < sum.size(); ++i)
    rep.reconstruction_error = std::max(rep.reconstruction_error, std::abs(f.values[i] - sum[i]));
  for (const auto& part : out.parts) {
    double m = 0;
    for (double v : part.values) m += powp(v, out.p);
    m *= std::pow(L.cell, L.n);
    if (std::abs(m - part.mass_p) > 1e-12 * std::max(1.0, m)) rep.failures.push_back("part mass mismatch");
  }

  rep.measured = measure_constants(out, f, L);
  const auto& c = rep.measured;
  const auto& b = rep.bounds;
  const double slack = 1.0 + 1e-12;
  if (rep.reconstruction_error != 0.0) rep.failures.push_back("f != g + sum b_j");
  if (!rep.disjoint) rep.failures.push_back("selected cubes overlap");
  if (c.g_inf_over_alpha > b.g_inf_over_alpha * slack) rep.failures.push_back("||g||_inf > 2^{n/p} alpha");
  if (c.g_p_over_f_p > b.g_p_over_f_p * slack) rep.failures.push_back("||g||_p > ||f||_p");
  if (c.iv_max > b.iv * slack) rep.failures.push_back("int|b_j|^p > C alpha^p |B_j|");
  if (c.cube_sum_ratio > b.cube_sum * slack) rep.failures.push_back("sum |Q_j| > alpha^{-p} ||f||_p^p");
  if (c.ball_sum_ratio > b.ball_sum * slack) rep.failures.push_back("sum |B_j| > C alpha^{-p} ||f||_p^p");
  if (c.overlap > b.overlap) rep.failures.push_back("overlap of 4B_j exceeds K_n");
  return rep;
}

std::vector<int> ball_cover_counts(const CZOutput& out, double dilation)
{
  Layout L = check_grid(*out.g.grid);
  return cover_counts(out.parts, *out.g.grid, L, dilation);
}

int radius_group(double r, double R)
{
  if (!(r > 0) || !(R > 0)) throw ConfigError("radius_group: r and R must be > 0");
  int k = static_cast<int>(std::floor(std::log2(r * R)));
  while (std::ldexp(1.0, k) / R > r) --k;
  while (std::ldexp(1.0, k + 1) / R <= r) ++k;
  return k;
}

std::map<int, std::vector<std::size_t>> partition_by_radius(const CZOutput& out, double R)
{
  if (!(R > 0)) throw ConfigError("partition_by_radius: R must be > 0");
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t j = 0; j < out.parts.size(); ++j) groups[radius_group(out.parts[j].ball_radius, R)].push_back(j);
  return groups;
}

}  // namespace hermite_riesz
