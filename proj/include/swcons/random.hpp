#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swcons/dynamics.hpp"

namespace swcons {

/// All randomness derives from std::mt19937_64 seeded with one 64-bit value.
/// Draws are mapped to doubles and integers by explicit formulas (top 53 bits;
/// rejection sampling) so outputs do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

struct RandomScheduleParams {
  std::size_t segments = 10;
  double ct_min = 0.5;
  double ct_max = 5.0;
  std::uint64_t dt_min = 1;
  std::uint64_t dt_max = 10;
  std::vector<std::string> topology_ids;
};

/// Each segment independently picks CT or DT with probability 1/2, a length
/// uniformly from its range, and a topology uniformly from the ids.
Schedule random_schedule(std::uint64_t seed, const RandomScheduleParams& params);

/// n independent draws uniform in [lo, hi).
Eigen::VectorXd random_state(std::uint64_t seed, std::size_t n, double lo, double hi);

}  // namespace swcons
