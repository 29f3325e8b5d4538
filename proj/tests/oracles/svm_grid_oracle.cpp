// Brute-force oracle for the 4-point 2-D hinge-loss fixture used in
// svm_test and the acceptance suite. Grid-searches (w1, w2, b) over
// [-3, 3]^3 at step 0.01 and prints the minimum primal objective, then
// reports a step-0.001 refinement around the argmin as a discretization check.
// Independent of the library: plain loops over the objective definition.

#include <algorithm>
#include <cstdio>

namespace {

struct Point {
  double x1, x2;
  int y;
};

// Must match kTwoDFixture in svm_test.cpp.
constexpr Point kPoints[] = {{-0.5, 2.0, +1}, {2.0, 3.0, +1}, {2.0, -1.0, -1}, {0.5, 2.0, -1}};
constexpr double kC = 1.0;

double objective(double w1, double w2, double b) {
  double loss = 0.0;
  for (const auto& p : kPoints) loss += std::max(0.0, 1.0 - p.y * (w1 * p.x1 + w2 * p.x2 + b));
  return 0.5 * (w1 * w1 + w2 * w2) + kC * loss;
}

}  // namespace

int main() {
  double best = 1e300, bw1 = 0, bw2 = 0, bb = 0;
  for (int i = -300; i <= 300; ++i)
    for (int j = -300; j <= 300; ++j)
      for (int k = -300; k <= 300; ++k) {
        const double w1 = i * 0.01, w2 = j * 0.01, b = k * 0.01;
        const double f = objective(w1, w2, b);
        if (f < best) best = f, bw1 = w1, bw2 = w2, bb = b;
      }
  double fine = best;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j)
      for (int k = -20; k <= 20; ++k) fine = std::min(fine, objective(bw1 + i * 1e-3, bw2 + j * 1e-3, bb + k * 1e-3));
  std::printf("grid_min=%.12f at w=(%.2f, %.2f) b=%.2f\nrefined_min=%.12f\n", best, bw1, bw2, bb, fine);
}
