#include "mvpc/rng.hpp"

#include <cmath>

namespace mvpc {

namespace {

// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_tag(std::string_view tag) {
  // FNV-1a over the tag bytes.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return mix64(base ^ mix64(hash_tag(tag)));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t a) {
  return mix64(derive_seed(base, tag) ^ mix64(a + 1));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t a,
                          std::uint64_t b) {
  return mix64(derive_seed(base, tag, a) ^ mix64(b + 2));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) {
  return mix64(derive_seed(base, tag, a, b) ^ mix64(c + 3));
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) return lo;
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(eng_());  // full 64-bit range
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t draw;
  do {
    draw = eng_();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  shuffle(p);
  return p;
}

}  // namespace mvpc
