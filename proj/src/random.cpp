#include "swcons/random.hpp"

#include <cmath>
#include <limits>

#include "swcons/error.hpp"

namespace swcons {

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) fail_input("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return engine_();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return lo + draw % range;
}

Schedule random_schedule(std::uint64_t seed, const RandomScheduleParams& p) {
  if (p.topology_ids.empty()) fail_input("random schedule needs at least one topology id");
  if (!(p.ct_min > 0.0) || !(p.ct_max >= p.ct_min) || !std::isfinite(p.ct_max))
    fail_input("CT duration range must satisfy 0 < ct_min <= ct_max");
  if (p.dt_min == 0 || p.dt_max < p.dt_min) fail_input("DT step range must satisfy 1 <= dt_min <= dt_max");

  Rng rng(seed);
  Schedule s;
  s.segments.reserve(p.segments);
  for (std::size_t k = 0; k < p.segments; ++k) {
    const bool ct = rng.coin();
    const double duration = rng.uniform(p.ct_min, p.ct_max);
    const auto steps = rng.uniform_int(p.dt_min, p.dt_max);
    const auto& id = p.topology_ids[rng.uniform_int(0, p.topology_ids.size() - 1)];
    s.segments.push_back(ct ? Segment::ct(duration, id) : Segment::dt(steps, id));
  }
  return s;
}

Eigen::VectorXd random_state(std::uint64_t seed, std::size_t n, double lo, double hi) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) fail_input("initial-state range must satisfy lo < hi");
  Rng rng(seed);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = rng.uniform(lo, hi);
  return x;
}

}  // namespace swcons
