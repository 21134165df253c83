#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cosite {

// SplitMix64 step, the usual 64-bit finalizer. Used only to turn seed
// material into well-separated stream roots.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Draw purposes. Every (purpose, index...) tuple owns an independent RNG
// stream, so enlarging one array (say the antenna count) extends that
// object's draw sequence without shifting anything else. Paired-seed
// comparisons across schemes rely on this.
enum class Stream : std::uint64_t {
  kPlacement = 1,       // user drop inside the configured region
  kIrsBsFading = 2,     // per-surface IRS-BS small-scale realization
  kCtrlFading = 3,      // per-surface controller-IRS realization
  kDirectFading = 4,    // per-user direct-link realization
  kUserIrsFading = 5,   // per-(user, surface) realization
  kAoInit = 6,          // random reflection initialization
  kEstimationNoise = 7, // additive error in the noisy estimation mode
  kAssociation = 8,     // random-association benchmark subset draw
  kReferencePick = 9,   // user-side benchmark reference-user selection
};

// Derives named mt19937_64 streams from one trial-level seed.
class RngFactory {
 public:
  explicit RngFactory(std::uint64_t trial_seed) : trial_seed_(trial_seed) {}

  std::mt19937_64 make(Stream purpose, std::uint64_t a = 0,
                       std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t h = trial_seed_;
    h = absorb(h, static_cast<std::uint64_t>(purpose));
    h = absorb(h, a);
    h = absorb(h, b);
    h = absorb(h, c);
    return std::mt19937_64(h);
  }

  std::uint64_t trial_seed() const { return trial_seed_; }

 private:
  static std::uint64_t absorb(std::uint64_t h, std::uint64_t v) {
    std::uint64_t s = h + 0x9E3779B97F4A7C15ULL * (v + 1);
    return splitmix64(s);
  }

  std::uint64_t trial_seed_;
};

// Uniform double in [0, 1) built from the top 53 bits. The distribution
// classes in <random> are avoided on purpose: their draw counts are
// implementation-defined, and fixed consumption is what keeps matched-seed
// runs reproducible across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Circularly symmetric complex Gaussian with E|z|^2 = 1 (Box-Muller,
// exactly two uniforms per draw).
inline std::complex<double> complex_gaussian(std::mt19937_64& rng) {
  double u = 1.0 - uniform01(rng);  // (0, 1], keeps log() finite
  double r = std::sqrt(-std::log(u));
  double phi = 2.0 * M_PI * uniform01(rng);
  return {r * std::cos(phi), r * std::sin(phi)};
}

// Unit-modulus value with uniform phase.
inline std::complex<double> random_phase(std::mt19937_64& rng) {
  double phi = 2.0 * M_PI * uniform01(rng);
  return {std::cos(phi), std::sin(phi)};
}

}  // namespace cosite
