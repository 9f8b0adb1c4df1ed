#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace stochlog {

using Engine = std::mt19937_64;

/// Independent engine for a master seed and a key path such as
/// (estimator tag, replicate, path). Every path owns one, so ensembles do
/// not depend on thread scheduling.
Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
  return make_engine(seed, {stream, substream});
}

/// Stream tags keeping estimator families from sharing random numbers.
namespace stream_tag {
inline constexpr std::uint64_t kEuler = 1;
inline constexpr std::uint64_t kBirthDeath = 2;
inline constexpr std::uint64_t kPedersen = 3;
inline constexpr std::uint64_t kBridge = 4;
inline constexpr std::uint64_t kNonparametric = 5;
inline constexpr std::uint64_t kReplicate = 6;
}  // namespace stream_tag

}  // namespace stochlog
