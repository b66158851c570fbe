#ifndef FOLMT_RANDOM_HPP
#define FOLMT_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace folmt {

// std::mt19937_64 is fully specified by the standard; the distributions are
// not. Everything that must reproduce across platforms goes through these.
using Rng = std::mt19937_64;

// Uniform integer in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

template <class T>
void seeded_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

// 64-bit FNV-1a, used for stable content hashes and derived seeds.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    // field separator so ("ab","c") and ("a","bc") differ
    state_ ^= 0xff;
    state_ *= 0x100000001b3ULL;
    return *this;
  }
  Fnv1a& add(std::uint64_t value) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    return add(std::string_view(buf, 8));
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace folmt

#endif  // FOLMT_RANDOM_HPP
