#pragma once

#include <cstdint>
#include <random>

namespace urn {

// Seeded random stream. Ensembles use one root seed; the stream for
// replicate r is derived as RngStream(root, r), which seeds a fresh
// mt19937_64 from seed_seq{lo(root), hi(root), lo(r), hi(r), tag}. The
// derivation is a pure function of (root, r), so replicate results do not
// depend on scheduling or worker count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  RngStream(std::uint64_t root_seed, std::uint64_t stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(root_seed),
                      static_cast<std::uint32_t>(root_seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32),
                      0x9e3779b9u};
    gen_.seed(seq);
  }

  std::uint64_t raw() { return gen_(); }

  // uniform integer in [0, n), n >= 1
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(gen_);
  }

  double uniform01() {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    return d(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace urn
