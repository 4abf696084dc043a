#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qsfp {

/// A reproducible random stream identified by a root seed and a key path.
///
/// Substreams are derived from the identity (seed, path) alone, never from
/// the parent's draw position, so `substream(k)` always yields the same
/// sequence. Parallel code forks once and hands `substream(chunk)` to each
/// worker; results then do not depend on the number of threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Child stream keyed by `key`. Does not advance this stream.
  RngStream substream(std::uint64_t key) const;

  /// Child stream keyed by the next draw of this stream.
  RngStream fork();

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer on {0, ..., n - 1}; n must be positive.
  std::uint64_t index(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  /// "seed/key/key/..." identity string used for provenance records.
  std::string describe() const;

 private:
  RngStream(std::uint64_t seed, std::vector<std::uint64_t> path);

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
};

}  // namespace qsfp
