#include "stablepoly/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace stablepoly {

std::int64_t sup_norm(const Site& x) {
  return std::max({std::llabs(x[0]), std::llabs(x[1]), std::llabs(x[2])});
}

std::int64_t squared_norm(const Site& x) {
  return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
}

std::string to_string(const Site& x, int dim) {
  std::string out = "(";
  for (int a = 0; a < dim; ++a) {
    if (a) out += ",";
    out += std::to_string(x[a]);
  }
  return out + ")";
}

Box Box::single(int dim, const Site& x) { return Box{dim, x, x}; }

std::size_t Box::volume() const {
  if (empty()) return 0;
  std::size_t v = 1;
  for (int a = 0; a < dim; ++a) v *= static_cast<std::size_t>(extent(a));
  return v;
}

bool Box::empty() const {
  for (int a = 0; a < dim; ++a)
    if (hi[a] < lo[a]) return true;
  return false;
}

bool Box::contains(const Site& x) const {
  for (int a = 0; a < dim; ++a)
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  return true;
}

std::size_t Box::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(extent(a));
  return s;
}

std::size_t Box::index(const Site& x) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a)
    idx = idx * static_cast<std::size_t>(extent(a)) + static_cast<std::size_t>(x[a] - lo[a]);
  return idx;
}

Site Box::site(std::size_t index) const {
  Site x{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    const auto e = static_cast<std::size_t>(extent(a));
    x[a] = lo[a] + static_cast<std::int64_t>(index % e);
    index /= e;
  }
  return x;
}

Box Box::sum(const Box& other) const {
  Box out{dim, lo + other.lo, hi + other.hi};
  for (int a = dim; a < kMaxDim; ++a) out.lo[a] = out.hi[a] = 0;
  return out;
}

Box Box::intersect(const Box& other) const {
  Box out{dim, lo, hi};
  for (int a = 0; a < dim; ++a) {
    out.lo[a] = std::max(lo[a], other.lo[a]);
    out.hi[a] = std::min(hi[a], other.hi[a]);
  }
  return out;
}

}  // namespace stablepoly
