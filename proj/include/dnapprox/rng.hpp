#pragma once

#include <cstdint>
#include <random>

namespace dnapprox {

/// Deterministic random stream keyed by (seed, stream_id).
///
/// Two streams with equal keys produce identical sequences. Child streams are
/// derived with split(); experiments key their streams by (size index,
/// replicate block) so output never depends on the number of worker threads.
/// A stream is not thread-safe; each task owns its own.
class RngStream {
 public:
  using Engine = std::mt19937_64;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Stream for a sub-task; equal (parent, child) pairs give equal streams.
  RngStream split(std::uint64_t child) const;

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  std::uint64_t bits() { return engine_(); }
  std::int64_t poisson(double mean);
  std::int64_t binomial(std::int64_t trials, double p);
  /// Index in [0, n).
  std::uint64_t below(std::uint64_t n);

  Engine& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  Engine engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

RngStream make_rng(std::uint64_t seed, std::uint64_t stream_id);

}  // namespace dnapprox
