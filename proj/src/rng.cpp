#include "stochlog/rng.hpp"

#include <vector>

namespace stochlog {

Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (std::uint64_t k : keys) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  words.push_back(0x5eedu);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace stochlog
