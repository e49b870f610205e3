#include "gibbslab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "gibbslab/errors.hpp"

namespace gibbslab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonDominant: return "NonDominant";
    case ErrorKind::AsymmetricInteraction: return "AsymmetricInteraction";
    case ErrorKind::DecayViolated: return "DecayViolated";
    case ErrorKind::IllTemperedBoundary: return "IllTemperedBoundary";
    case ErrorKind::InvalidPotential: return "InvalidPotential";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::EigensolveFailure: return "EigensolveFailure";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NonFiniteEnergy: return "NonFiniteEnergy";
    case ErrorKind::TooFewBatches: return "TooFewBatches";
    case ErrorKind::BadRadius: return "BadRadius";
    case ErrorKind::NotDominant: return "NotDominant";
    case ErrorKind::ConditionViolated: return "ConditionViolated";
    case ErrorKind::NoAdmissibleL: return "NoAdmissibleL";
    case ErrorKind::BadSplit: return "BadSplit";
    case ErrorKind::DegeneratePoints: return "DegeneratePoints";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::string to_string(const Site& s) {
  std::string out = "(";
  for (std::size_t a = 0; a < s.dim(); ++a) {
    if (a) out += ",";
    out += std::to_string(s[a]);
  }
  return out + ")";
}

std::int64_t dist(const Site& i, const Site& j) {
  if (i.dim() != j.dim()) {
    throw Error(ErrorKind::DimensionMismatch, to_string(i) + " vs " + to_string(j));
  }
  std::int64_t d = 0;
  for (std::size_t a = 0; a < i.dim(); ++a) d = std::max(d, std::abs(i[a] - j[a]));
  return d;
}

bool Ball::contains(const Site& s) const { return static_cast<double>(dist(center, s)) <= radius; }

Lattice::Lattice(std::vector<std::int64_t> extents) : Lattice(std::vector<std::int64_t>(extents.size(), 0), extents) {}

Lattice::Lattice(std::vector<std::int64_t> lower, std::vector<std::int64_t> extents)
    : lower_(std::move(lower)), extents_(std::move(extents)) {
  if (extents_.empty() || lower_.size() != extents_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "lattice needs matching lower corner and extents, d >= 1");
  }
  size_ = 1;
  for (auto e : extents_) {
    if (e <= 0) throw Error(ErrorKind::InvalidArgument, "lattice extents must be positive");
    size_ *= static_cast<std::size_t>(e);
  }
}

bool Lattice::contains(const Site& s) const {
  if (s.dim() != dim()) return false;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (s[a] < lower_[a] || s[a] >= lower_[a] + extents_[a]) return false;
  }
  return true;
}

Site Lattice::site(std::size_t index) const {
  Site s;
  s.coords.resize(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    const auto e = static_cast<std::size_t>(extents_[a]);
    s[a] = lower_[a] + static_cast<std::int64_t>(index % e);
    index /= e;
  }
  return s;
}

std::size_t Lattice::index(const Site& s) const {
  if (!contains(s)) throw Error(ErrorKind::InvalidArgument, "site " + to_string(s) + " not in lattice");
  std::size_t idx = 0;
  for (std::size_t a = dim(); a-- > 0;) {
    idx = idx * static_cast<std::size_t>(extents_[a]) + static_cast<std::size_t>(s[a] - lower_[a]);
  }
  return idx;
}

std::int64_t Lattice::distance_to(const Site& s) const {
  if (s.dim() != dim()) throw Error(ErrorKind::DimensionMismatch, "site dimension");
  std::int64_t d = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    const auto lo = lower_[a];
    const auto hi = lower_[a] + extents_[a] - 1;
    if (s[a] < lo) d = std::max(d, lo - s[a]);
    if (s[a] > hi) d = std::max(d, s[a] - hi);
  }
  return d;
}

std::int64_t Lattice::distance_to_boundary(const Site& s) const {
  std::int64_t d = std::numeric_limits<std::int64_t>::max();
  for (std::size_t a = 0; a < dim(); ++a) {
    d = std::min(d, s[a] - lower_[a] + 1);
    d = std::min(d, lower_[a] + extents_[a] - s[a]);
  }
  return d;
}

std::int64_t Lattice::max_extent() const { return *std::max_element(extents_.begin(), extents_.end()); }

namespace {

// Visits every point of the axis-aligned box [lo, hi] (inclusive).
template <typename Fn>
void for_each_in_box(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi, Fn&& fn) {
  const std::size_t d = lo.size();
  for (std::size_t a = 0; a < d; ++a)
    if (lo[a] > hi[a]) return;
  Site s(lo);
  while (true) {
    fn(s);
    std::size_t a = 0;
    for (; a < d; ++a) {
      if (++s[a] <= hi[a]) break;
      s[a] = lo[a];
    }
    if (a == d) return;
  }
}

}  // namespace

std::vector<Site> ball(const Site& center, double radius, const Lattice& lattice) {
  std::vector<Site> out;
  for (auto idx : ball_indices(center, radius, lattice)) out.push_back(lattice.site(idx));
  return out;
}

std::vector<std::size_t> ball_indices(const Site& center, double radius, const Lattice& lattice) {
  if (center.dim() != lattice.dim()) throw Error(ErrorKind::DimensionMismatch, "ball center dimension");
  const auto r = static_cast<std::int64_t>(std::floor(radius));
  std::vector<std::int64_t> lo(lattice.dim()), hi(lattice.dim());
  for (std::size_t a = 0; a < lattice.dim(); ++a) {
    lo[a] = std::max(center[a] - r, lattice.lower()[a]);
    hi[a] = std::min(center[a] + r, lattice.lower()[a] + lattice.extents()[a] - 1);
  }
  std::vector<std::size_t> out;
  for_each_in_box(lo, hi, [&](const Site& s) { out.push_back(lattice.index(s)); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Site> ball_unclipped(const Site& center, double radius) {
  const auto r = static_cast<std::int64_t>(std::floor(radius));
  std::vector<std::int64_t> lo(center.dim()), hi(center.dim());
  for (std::size_t a = 0; a < center.dim(); ++a) {
    lo[a] = center[a] - r;
    hi[a] = center[a] + r;
  }
  std::vector<Site> out;
  for_each_in_box(lo, hi, [&](const Site& s) { out.push_back(s); });
  return out;
}

bool is_tiling_radius(double radius) {
  const double twice = 2.0 * radius;
  return radius > 0 && twice == std::floor(twice) && radius != std::floor(radius);
}

Site tile_center(const Site& s, double radius, const Site& origin) {
  const auto width = static_cast<std::int64_t>(2.0 * radius);
  const auto r = static_cast<std::int64_t>(std::floor(radius));
  Site c = s;
  for (std::size_t a = 0; a < s.dim(); ++a) {
    // Tile m covers [origin + m*width - r, origin + m*width + r].
    const std::int64_t shifted = s[a] - origin[a] + r;
    const std::int64_t m = shifted >= 0 ? shifted / width : -((-shifted + width - 1) / width);
    c[a] = origin[a] + m * width;
  }
  return c;
}

std::vector<Site> exterior_shell_sites(const Lattice& lattice, std::int64_t width) {
  std::vector<std::int64_t> lo(lattice.dim()), hi(lattice.dim());
  for (std::size_t a = 0; a < lattice.dim(); ++a) {
    lo[a] = lattice.lower()[a] - width;
    hi[a] = lattice.lower()[a] + lattice.extents()[a] - 1 + width;
  }
  std::vector<Site> out;
  for_each_in_box(lo, hi, [&](const Site& s) {
    if (!lattice.contains(s)) out.push_back(s);
  });
  return out;
}

}  // namespace gibbslab
