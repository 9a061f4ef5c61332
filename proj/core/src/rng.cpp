#include "wrobust/rng.hpp"

#include <cmath>

#include "wrobust/errors.hpp"

namespace wrobust {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t block) {
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  std::array<std::uint32_t, 4> c = {
      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::array<std::uint32_t, 4> next = {
        static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0,
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1,
        static_cast<std::uint32_t>(p0)};
    c = next;
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return c;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id) {}

void RngStream::refill() {
  buf_ = philox4x32(seed_, stream_, block_++);
  buf_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (buf_pos_ > 2) refill();
  const std::uint64_t lo = buf_[buf_pos_];
  const std::uint64_t hi = buf_[buf_pos_ + 1];
  buf_pos_ += 2;
  return lo | (hi << 32);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidInputError("RngStream::below: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

RngStream::State RngStream::state() const {
  return State{seed_, stream_, block_, buf_pos_, has_spare_, spare_};
}

void RngStream::restore(const State& s) {
  seed_ = s.seed;
  stream_ = s.stream;
  block_ = s.block;
  buf_pos_ = s.buf_pos;
  has_spare_ = s.has_spare;
  spare_ = s.spare;
  if (buf_pos_ < 4 && block_ > 0) {
    buf_ = philox4x32(seed_, stream_, block_ - 1);
  }
}

}  // namespace wrobust
