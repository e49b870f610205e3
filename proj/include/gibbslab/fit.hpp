#pragma once

#include <cstddef>
#include <map>
#include <vector>

namespace gibbslab {

struct FitPoint {
  double r = 0.0;
  double v = 0.0;
};

/// v ~ C (1 + r)^(-alpha_hat), least squares in log space.
struct FitResult {
  double C = 0.0;
  double alpha_hat = 0.0;
  double rmse = 0.0;
  std::size_t n_points = 0;
};

/// Drops r < r_min and the largest `outer_fraction` of the distinct distances.
struct FitWindow {
  double r_min = 2.0;
  double outer_fraction = 0.25;
};

FitResult fit_power_law(const std::vector<FitPoint>& points);
std::vector<FitPoint> apply_window(const std::vector<FitPoint>& points, const FitWindow& window = {});
/// Points with r in [lo, hi].
std::vector<FitPoint> restrict_range(const std::vector<FitPoint>& points, double lo, double hi);

/// Max value per distance; nonpositive values dropped.
std::vector<FitPoint> envelope(const std::vector<FitPoint>& points);

}  // namespace gibbslab
