#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace gibbslab {

/// Tree summation; the result does not depend on how work is split.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return pairwise_sum(x.data(), static_cast<std::size_t>(x.size()));
}
double pairwise_dot(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

/// log(sum exp(x)), stable for large |x|.
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& x);

/// GIBBSLAB_THREADS if set and positive, otherwise hardware concurrency.
unsigned thread_count();

/// Runs fn(begin, end) over [0, n) split into contiguous chunks.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Stateless counter-based generator: every draw is a hash of
/// (seed, a, b, c), so streams can be replayed in any order.
struct CounterRng {
  std::uint64_t seed = 0;

  std::uint64_t bits(std::uint64_t a, std::uint64_t b, std::uint64_t c) const;
  /// Uniform in (0, 1).
  double uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c) const;
  /// Standard normal via Box-Muller on two derived uniforms.
  double normal(std::uint64_t a, std::uint64_t b, std::uint64_t c) const;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gibbslab
