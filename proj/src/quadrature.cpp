#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rsl/error.hpp"
#include "rsl/numerics.hpp"

namespace rsl {

namespace {

// QUADPACK 15-point Kronrod abscissae; the odd-indexed ones are the 7-point Gauss nodes.
constexpr double kNodes[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                              0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                              0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                              0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrodWeights[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double abs_value;
};

Segment integrate_segment(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  double abs_sum = kKronrodWeights[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double f1 = f(centre - dx);
    const double f2 = f(centre + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  if (!std::isfinite(kronrod)) throw Error(ErrorCode::NonFiniteEntry, "integrand is not finite on the interval");
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), abs_sum * std::abs(half)};
}

}  // namespace

double quadrature(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(a <= b)) throw Error(ErrorCode::DimensionMismatch, "quadrature needs a <= b");
  if (a == b) return 0.0;
  constexpr std::size_t kMaxSegments = 4000;
  constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();

  std::vector<Segment> segments{integrate_segment(f, a, b)};
  for (;;) {
    double value = 0.0;
    double error = 0.0;
    double abs_value = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      value += segments[i].value;
      error += segments[i].error;
      abs_value += segments[i].abs_value;
      if (segments[i].error > segments[worst].error) worst = i;
    }
    if (error <= std::max(tol, kRoundoff * abs_value)) return value;
    if (segments.size() >= kMaxSegments) {
      throw Error(ErrorCode::SubdivisionLimit,
                  "error estimate " + std::to_string(error) + " above tolerance after " + std::to_string(kMaxSegments) +
                      " subdivisions");
    }
    const Segment split = segments[worst];
    const double mid = 0.5 * (split.a + split.b);
    segments[worst] = integrate_segment(f, split.a, mid);
    segments.push_back(integrate_segment(f, mid, split.b));
  }
}

}  // namespace rsl
