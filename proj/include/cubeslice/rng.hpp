#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace cubeslice {

// Seeded randomness with fully pinned semantics. mt19937_64 output is
// specified by the standard; the distributions below are implemented here
// because the std:: distribution algorithms are implementation-defined and
// would break byte-identical reports across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return eng_(); }

  // Unbiased draw from {0, ..., n-1} by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below(0)");
    const std::uint64_t threshold = (-n) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  // in [0,1), 53 random bits
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // in (0,1]
  double u01_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  // Box-Muller; both outputs are used.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = u01_pos();
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // P(true) = p exactly up to the 2^-64 lattice: draws U and compares
  // U / 2^64 < p in exact integer arithmetic.
  bool bernoulli(const Rational& p) {
    if (p < 0 || p > 1) throw std::invalid_argument("bernoulli probability outside [0,1]");
    std::uint64_t u = next_u64();
    // u * den < num * 2^64
    mpz_class lhs = mpz_class(u) * p.get_den();
    mpz_class rhs = p.get_num() << 64;
    return lhs < rhs;
  }

  // Categorical draw with exact rational weights (not necessarily normalized).
  // One 64-bit draw; bucket i is hit iff U/2^64 lands in [c_{i-1}, c_i).
  std::size_t categorical(const std::vector<Rational>& weights) {
    if (weights.empty()) throw std::invalid_argument("categorical: no weights");
    Rational total = 0;
    for (const auto& w : weights) {
      if (w < 0) throw std::invalid_argument("categorical: negative weight");
      total += w;
    }
    if (total <= 0) throw std::invalid_argument("categorical: zero total weight");
    std::uint64_t u = next_u64();
    Rational target(mpz_class(u), mpz_class(1) << 64);
    target.canonicalize();
    target *= total;
    Rational cum = 0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      cum += weights[i];
      if (target < cum) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 finalizer; used to derive independent per-worker / per-stage
// streams from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cubeslice
