#pragma once

#include <array>
#include <cstdint>

namespace wrobust {

/// SplitMix64 finalizer; used to derive stream ids and per-cell seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives the id of the k-th logical substream of `base`.
inline std::uint64_t substream_id(std::uint64_t base, std::uint64_t k) {
  return mix64(base + 0x9E3779B97F4A7C15ULL * (k + 1));
}

/// Counter-based random stream (Philox4x32-10). Two streams constructed with
/// the same (seed, stream_id) produce identical sequences; distinct stream
/// ids give independent streams, regardless of interleaving or scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on the open interval (0, 1); safe under log().
  double uniform_open();
  /// Standard normal (Box-Muller with cached spare).
  double gaussian();
  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  /// Full resumable state, including buffered output.
  struct State {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t block = 0;
    int buf_pos = 4;
    bool has_spare = false;
    double spare = 0.0;
  };
  State state() const;
  void restore(const State& s);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;  // consumed words; 4 means empty
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wrobust
