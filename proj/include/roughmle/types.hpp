#pragma once

#include <cstddef>

namespace roughmle {

/// Hurst index, strictly inside (0, 1).
class HurstParameter {
 public:
  explicit HurstParameter(double value);

  double value() const noexcept { return value_; }
  bool is_brownian() const noexcept { return value_ == 0.5; }
  friend bool operator==(HurstParameter a, HurstParameter b) noexcept {
    return a.value_ == b.value_;
  }

 private:
  double value_;
};

/// Uniform observation grid on [0, T] with N cells of width delta = T / N.
struct GridSpec {
  double T;
  std::size_t N;
  double delta;

  static GridSpec from_horizon(double T, std::size_t N);
  /// Keeps `delta` bit-exact; T = N * delta.
  static GridSpec from_spacing(double delta, std::size_t N);
  /// T = 1 normalization used by the spectral-norm experiments.
  static GridSpec unit(std::size_t n) { return from_horizon(1.0, n); }
};

}  // namespace roughmle
