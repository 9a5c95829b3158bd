// Prints the coincidence dip between two encoded points and their kernel.

#include <cstdio>

#include "homk/homk.hpp"

int main() {
  const homk::FeatureMap map = homk::FeatureMap::polynomial2();
  const homk::WeightVector w = homk::WeightVector::ones(3);
  homk::FeatureVector x(2), y(2);
  x << 1.0, 0.5;
  y << -0.5, 1.0;
  const homk::EncodedPhoton a = homk::encode(x, map, w);
  const homk::EncodedPhoton b = homk::encode(y, map, w);

  std::printf("kernel |<a|b>|^2 = %.6f\n", homk::kernel(a, b));
  const homk::ModeBasis basis(3, homk::TimeGrid());
  for (const auto& s : homk::dip_curve(a, b, basis, homk::linspace(-4.0, 4.0, 9)).samples) {
    std::printf("dt = %+.1f  cc = %.6f\n", s.delay, s.cc);
  }
}
