#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mvpc {

// All randomness in the toolkit flows from one user-supplied seed. Every
// component derives its own stream with derive_seed(base, "name", indices...),
// so adding a consumer never perturbs the draws of an existing one.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t a,
                          std::uint64_t b);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c);

// mt19937_64 plus hand-rolled distributions. The standard distribution
// objects are implementation-defined, which would break the "same seed, same
// bytes" guarantee across toolchains, so we map engine output ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on (0,1]: 53-bit mantissa, never exactly zero.
  double uniform01() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1p-53;
  }

  // Standard normal via Box-Muller; the pair's second value is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [lo, hi], rejection-sampled so it is exactly unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform01() <= p; }

  // Fisher-Yates permutation of 0..n-1.
  std::vector<int> permutation(int n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::int64_t i = static_cast<std::int64_t>(v.size()) - 1; i > 0; --i) {
      std::int64_t j = uniform_int(0, i);
      std::swap(v[i], v[j]);
    }
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mvpc
