#include "qsfp/rng.hpp"

#include <stdexcept>

namespace qsfp {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed,
                            const std::vector<std::uint64_t>& path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 2));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  push(path.size());
  for (auto key : path) push(key);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : RngStream(seed, {}) {}

RngStream::RngStream(std::uint64_t seed, std::vector<std::uint64_t> path)
    : seed_(seed), path_(std::move(path)), engine_(make_engine(seed_, path_)) {}

RngStream RngStream::substream(std::uint64_t key) const {
  auto child = path_;
  child.push_back(key);
  return RngStream(seed_, std::move(child));
}

RngStream RngStream::fork() { return substream(next_u64()); }

__extension__ using u128 = unsigned __int128;

std::uint64_t RngStream::index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::index: n must be positive");
  // Lemire's multiply-shift with rejection; unbiased.
  u128 m = static_cast<u128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(engine_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::string RngStream::describe() const {
  std::string out = std::to_string(seed_);
  for (auto key : path_) {
    out += '/';
    out += std::to_string(key);
  }
  return out;
}

}  // namespace qsfp
