#pragma once

// Split-stream seeding: one independent generator per (seed, run, purpose).

#include <cstdint>
#include <random>

namespace ncc {

enum class StreamPurpose : std::uint32_t {
  States = 1,
  Costs = 2,
  Rewards = 3,
  Shuffle = 4,
  CostMeans = 5,
  Policy = 6,
};

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t run, StreamPurpose purpose,
                                   std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(salt),
                    static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace ncc
