#include "gibbslab/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "gibbslab/errors.hpp"

namespace gibbslab {

FitResult fit_power_law(const std::vector<FitPoint>& points) {
  if (points.size() < 4) {
    throw Error(ErrorKind::TooFewPoints, std::to_string(points.size()) + " points, need at least 4");
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = points[static_cast<std::size_t>(k)];
    if (!(p.v > 0) || !(p.r >= 0)) {
      throw Error(ErrorKind::InvalidArgument, "fit needs r >= 0 and v > 0, got (" + std::to_string(p.r) + ", " +
                                                  std::to_string(p.v) + ")");
    }
    X(k, 0) = 1.0;
    X(k, 1) = std::log1p(p.r);
    y[k] = std::log(p.v);
  }
  if ((X.col(1).array() == X(0, 1)).all()) throw Error(ErrorKind::DegeneratePoints, "all distances equal");
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
  FitResult f;
  f.C = std::exp(beta[0]);
  f.alpha_hat = -beta[1];
  f.rmse = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(n));
  f.n_points = points.size();
  return f;
}

std::vector<FitPoint> apply_window(const std::vector<FitPoint>& points, const FitWindow& window) {
  std::set<double> distinct;
  for (const auto& p : points)
    if (p.r >= window.r_min) distinct.insert(p.r);
  const auto keep = static_cast<std::size_t>(
      std::ceil(static_cast<double>(distinct.size()) * (1.0 - window.outer_fraction) - 1e-9));
  std::vector<FitPoint> out;
  if (keep == 0) return out;
  const double r_max = *std::next(distinct.begin(), static_cast<std::ptrdiff_t>(keep - 1));
  for (const auto& p : points)
    if (p.r >= window.r_min && p.r <= r_max) out.push_back(p);
  return out;
}

std::vector<FitPoint> restrict_range(const std::vector<FitPoint>& points, double lo, double hi) {
  std::vector<FitPoint> out;
  for (const auto& p : points)
    if (p.r >= lo && p.r <= hi) out.push_back(p);
  return out;
}

std::vector<FitPoint> envelope(const std::vector<FitPoint>& points) {
  std::map<double, double> best;
  for (const auto& p : points) {
    if (!(p.v > 0)) continue;
    auto [it, inserted] = best.emplace(p.r, p.v);
    if (!inserted) it->second = std::max(it->second, p.v);
  }
  std::vector<FitPoint> out;
  for (auto [r, v] : best) out.push_back({r, v});
  return out;
}

}  // namespace gibbslab
