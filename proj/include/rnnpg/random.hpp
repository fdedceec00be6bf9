#pragma once

#include <cstdint>
#include <random>

namespace rnnpg {

/// Substream identifiers. Every consumer of randomness draws from its own
/// substream of the run seed, so adding boundary points never shifts the
/// network parameters and vice versa.
enum class Stream : std::uint64_t {
  displacement_net = 1,
  stress_net = 2,
  boundary = 3,
  test = 99,
};

/// Seedable, splittable generator. The engine is mt19937_64 seeded through
/// std::seed_seq from (seed, stream); both algorithms are fully specified by
/// the standard, and the uniform mapping below is done by hand so draws are
/// bitwise identical across standard library implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);
  Rng(std::uint64_t seed, Stream stream)
      : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Independent child generator, deterministic in (seed, stream, child).
  Rng split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace rnnpg
