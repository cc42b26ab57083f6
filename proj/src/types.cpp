#include "roughmle/types.hpp"

#include <cmath>
#include <sstream>

#include "roughmle/errors.hpp"

namespace roughmle {

HurstParameter::HurstParameter(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    std::ostringstream msg;
    msg << "Hurst parameter must lie in (0, 1), got " << value;
    throw DomainError(msg.str());
  }
}

GridSpec GridSpec::from_horizon(double T, std::size_t N) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("grid horizon T must be positive");
  if (N == 0) throw DomainError("grid needs at least one cell");
  return GridSpec{T, N, T / static_cast<double>(N)};
}

GridSpec GridSpec::from_spacing(double delta, std::size_t N) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("grid spacing must be positive");
  if (N == 0) throw DomainError("grid needs at least one cell");
  return GridSpec{delta * static_cast<double>(N), N, delta};
}

}  // namespace roughmle
