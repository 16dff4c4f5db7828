#pragma once

#include <cstdint>

#include "biaslab/types.hpp"

namespace biaslab {

/// Counter-based deterministic RNG (splitmix64 output function).
///
/// The full state is {seed, counter}, so a stream is trivially serializable
/// and the sample sequence is bit-identical across platforms, runs and thread
/// counts. Independent substreams for sweep cells are derived by hashing a
/// tag into a fresh seed; derivation never perturbs the parent stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), counter_(0) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1); never returns an endpoint (safe under log).
  double uniform_open();

  /// Standard normal via Box–Muller (the spare deviate is cached).
  double normal();
  double normal(double mean, double std_dev);

  /// Child stream keyed by `tag`; children with distinct tags are
  /// statistically independent of each other and of the parent.
  RngStream derive(std::uint64_t tag) const;
  RngStream derive(std::uint64_t tag1, std::uint64_t tag2) const {
    return derive(tag1).derive(tag2);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// rows×cols matrix of i.i.d. N(mean, std²) entries, filled row by row.
/// std = 0 yields the constant matrix.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double mean,
                       double std_dev, RngStream& rng);

/// Length-n vector of i.i.d. N(mean, std²) entries.
Vector gaussian_vector(Eigen::Index n, double mean, double std_dev,
                       RngStream& rng);

}  // namespace biaslab
