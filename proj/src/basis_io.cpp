#include <cmath>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/hermite_basis.hpp"
#include "hermite_riesz/output.hpp"

namespace hermite_riesz {

void save_basis(const std::string& path, int dim, const Basis1D& basis)
{
  io::BinaryWriter w;
  w.magic("HRB1");
  w.u32(static_cast<std::uint32_t>(dim));
  w.u32(static_cast<std::uint32_t>(basis.k_max));
  w.u32(static_cast<std::uint32_t>(basis.points.size()));
  for (double x : basis.points) w.f64(x);
  for (int k = 0; k <= basis.k_max; ++k)
    for (std::size_t i = 0; i < basis.points.size(); ++i) w.f64(basis(k, i));
  io::atomic_write(path, w.bytes());
}

Basis1D load_basis(const std::string& path, int* dim)
{
  io::BinaryReader r(io::read_file(path), path);
  r.expect_magic("HRB1");
  std::uint32_t d = r.u32();
  std::uint32_t k_max = r.u32();
  std::uint32_t npts = r.u32();
  if (d < 1 || d > 16 || k_max > 100000 || npts > 100000000u)
    throw ConfigError(path + ": implausible HRB1 header");
  Basis1D b;
  b.k_max = static_cast<int>(k_max);
  b.points.resize(npts);
  for (auto& x : b.points) x = r.f64();
  b.values.resize(k_max + 1, npts);
  for (std::uint32_t k = 0; k <= k_max; ++k)
    for (std::uint32_t i = 0; i < npts; ++i) {
      double v = r.f64();
      if (!std::isfinite(v)) throw ConfigError(path + ": non-finite basis value");
      b.values(k, i) = v;
    }
  if (!r.at_end()) throw ConfigError(path + ": trailing bytes after HRB1 payload");
  if (dim) *dim = static_cast<int>(d);
  return b;
}

}  // namespace hermite_riesz
