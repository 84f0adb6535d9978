#ifndef SRMCA_TESTS_REFERENCE_HARNESS_HPP
#define SRMCA_TESTS_REFERENCE_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

struct Summary
{
  std::uint64_t scenarios = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t steps = 0;      ///< observations compared
  std::uint64_t schedules = 0;  ///< play-out times compared
  std::vector<std::string> diffs; ///< first divergence of the first few bad seeds
};

/// Seeds 1..scenarios, each a random small scenario (<= 200 frames, one
/// producer and up to two consumers, lossy links).
Summary
compare(std::uint64_t scenarios);

} // namespace oracle

#endif
