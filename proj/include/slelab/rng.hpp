#pragma once

#include <cmath>
#include <cstdint>

namespace slelab {

// Counter-based generator: output i of stream (seed, id) is mix(key, i),
// so identical (seed, id) always reproduce the same sequence and distinct
// ids give statistically independent streams without jump-ahead logic.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : key_(derive_key(seed, stream_id)) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

  // uniform on (0,1), never returns an endpoint
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  bool coin() { return (next_u64() & 1ull) != 0; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double c = std::cos(6.283185307179586477 * u2);
    double s = std::sin(6.283185307179586477 * u2);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t id) {
    std::uint64_t k = mix(seed + 0x9e3779b97f4a7c15ull);
    k = mix(k ^ (id + 0xd1b54a32d192ed03ull));
    return k;
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace slelab
