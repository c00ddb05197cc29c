#ifndef MIXSEM_RANDOM_HPP
#define MIXSEM_RANDOM_HPP

#include <cstdint>
#include <random>

namespace mixsem {

/// Independent generator for (seed, stream); used so parallel work items
/// never share state.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace mixsem

#endif  // MIXSEM_RANDOM_HPP
