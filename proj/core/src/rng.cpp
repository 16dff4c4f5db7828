#include "biaslab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace biaslab {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(seed_ + counter_ * kGolden);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double RngStream::normal(double mean, double std_dev) {
  if (std_dev < 0.0) throw std::invalid_argument("normal: std_dev must be >= 0");
  if (std_dev == 0.0) return mean;
  return mean + std_dev * normal();
}

RngStream RngStream::derive(std::uint64_t tag) const {
  return RngStream(mix64(seed_ ^ mix64(tag + kGolden)));
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double mean,
                       double std_dev, RngStream& rng) {
  if (std_dev < 0.0) {
    throw std::invalid_argument("gaussian_matrix: std_dev must be >= 0");
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = rng.normal(mean, std_dev);
    }
  }
  return out;
}

Vector gaussian_vector(Eigen::Index n, double mean, double std_dev,
                       RngStream& rng) {
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = rng.normal(mean, std_dev);
  return out;
}

}  // namespace biaslab
