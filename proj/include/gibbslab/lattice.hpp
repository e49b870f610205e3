#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gibbslab {

/// A point of Z^d.
struct Site {
  std::vector<std::int64_t> coords;

  Site() = default;
  Site(std::initializer_list<std::int64_t> c) : coords(c) {}
  explicit Site(std::vector<std::int64_t> c) : coords(std::move(c)) {}

  std::size_t dim() const { return coords.size(); }
  std::int64_t operator[](std::size_t a) const { return coords[a]; }
  std::int64_t& operator[](std::size_t a) { return coords[a]; }

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

std::string to_string(const Site& s);

/// l-infinity distance. Throws DimensionMismatch when dimensions differ.
std::int64_t dist(const Site& i, const Site& j);

/// Ball B_R(center) = { i : |i - center| <= R }. The radius is a plain
/// positive real; half-integers give the tiling convention.
struct Ball {
  Site center;
  double radius = 0.5;

  bool contains(const Site& s) const;
};

/// Rectangular finite lattice with per-axis lower corner and extent.
/// Sites are linearised with axis 0 fastest.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(std::vector<std::int64_t> extents);
  Lattice(std::vector<std::int64_t> lower, std::vector<std::int64_t> extents);

  std::size_t dim() const { return extents_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<std::int64_t>& extents() const { return extents_; }
  const std::vector<std::int64_t>& lower() const { return lower_; }

  bool contains(const Site& s) const;
  Site site(std::size_t index) const;
  std::size_t index(const Site& s) const;

  /// l-infinity distance from a site to the lattice (0 inside).
  std::int64_t distance_to(const Site& s) const;
  /// Distance from an interior site to the complement of the lattice.
  std::int64_t distance_to_boundary(const Site& s) const;

  std::int64_t max_extent() const;

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  std::vector<std::int64_t> lower_;
  std::vector<std::int64_t> extents_;
  std::size_t size_ = 0;
};

/// Sites of the lattice within distance R of center, in index order.
std::vector<Site> ball(const Site& center, double radius, const Lattice& lattice);
std::vector<std::size_t> ball_indices(const Site& center, double radius, const Lattice& lattice);

/// All sites of Z^d within distance R of center (unclipped).
std::vector<Site> ball_unclipped(const Site& center, double radius);

/// True when 2R is an integer and R is not.
bool is_tiling_radius(double radius);

/// The center of the tile of radius R (tiling 2R Z^d, offset by `origin`)
/// that contains s.
Site tile_center(const Site& s, double radius, const Site& origin);

/// Sites outside `lattice` within distance `width` of it.
std::vector<Site> exterior_shell_sites(const Lattice& lattice, std::int64_t width);

}  // namespace gibbslab
