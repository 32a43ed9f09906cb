#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace stablepoly {

inline constexpr int kMaxDim = 3;

/// A point of Z^d, d <= 3. Unused trailing coordinates are zero.
using Site = std::array<std::int64_t, kMaxDim>;

inline Site operator+(const Site& a, const Site& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Site operator-(const Site& a, const Site& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Site operator-(const Site& a) { return {-a[0], -a[1], -a[2]}; }

std::int64_t sup_norm(const Site& x);
std::int64_t squared_norm(const Site& x);
std::string to_string(const Site& x, int dim);

/// Rectangular box of lattice sites with inclusive corners, stored row-major
/// (last axis fastest), so iteration order is lexicographic.
struct Box {
  int dim = 1;
  Site lo{0, 0, 0};
  Site hi{0, 0, 0};

  static Box single(int dim, const Site& x);

  std::int64_t extent(int axis) const { return hi[axis] - lo[axis] + 1; }
  std::size_t volume() const;
  bool empty() const;
  bool contains(const Site& x) const;
  std::size_t index(const Site& x) const;
  Site site(std::size_t index) const;
  std::size_t stride(int axis) const;

  /// Minkowski sum with another box.
  Box sum(const Box& other) const;
  Box intersect(const Box& other) const;
  bool operator==(const Box&) const = default;
};

}  // namespace stablepoly
