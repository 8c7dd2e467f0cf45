#include "nbd/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace nbd {

double RngStream::gamma(double shape) {
  if (shape < 1.0) throw std::invalid_argument("RngStream::gamma requires shape >= 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

int RngStream::categorical(std::span<const double> probs) {
  const double u = uniform();
  double acc = 0.0;
  const int n = static_cast<int>(probs.size());
  for (int i = 0; i < n; ++i) {
    acc += probs[i];
    if (u <= acc) return i;
  }
  return n - 1;  // guard against accumulated rounding
}

}  // namespace nbd
