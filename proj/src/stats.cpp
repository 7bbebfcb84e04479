#include "rluroth/stats.hpp"

#include "rluroth/rational.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace rluroth {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;
constexpr std::int64_t kHarmonicTable = 128;

const std::array<double, kHarmonicTable + 1>& harmonic_table() {
  static const auto table = [] {
    std::array<double, kHarmonicTable + 1> t{};
    long double acc = 0;
    for (std::int64_t k = 1; k <= kHarmonicTable; ++k) {
      acc += 1.0L / static_cast<long double>(k);
      t[k] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

std::int64_t floor_inverse(double z) {
  if (!(z > 0.0 && z <= 1.0)) throw DomainError("CDF argument must lie in (0, 1]");
  return static_cast<std::int64_t>(std::floor(1.0 / z));
}

}  // namespace

double harmonic(std::int64_t m) {
  if (m < 0) throw DomainError("harmonic: negative index");
  if (m <= kHarmonicTable) return harmonic_table()[m];
  const double x = static_cast<double>(m);
  const double x2 = 1.0 / (x * x);
  return std::log(x) + kEulerGamma + 0.5 / x -
         x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 / 252));
}

double f_luroth(double z) {
  const std::int64_t m = floor_inverse(z);
  return z * (harmonic(m + 1) - 1.0) + 1.0 / static_cast<double>(m + 1);
}

double f_alternating(double z) {
  const std::int64_t m = floor_inverse(z);
  return z * harmonic(m - 1) + 1.0 / static_cast<double>(m);
}

double f_theta(double z, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  return p * f_luroth(z) + (1.0 - p) * f_alternating(z);
}

double m_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  return p * (2 * kZeta2 - 3) / 2 + (2 - kZeta2) / 2;
}

SeriesEnclosure luroth_series_lyapunov(std::int64_t truncation) {
  if (truncation < 2) throw DomainError("truncation must be >= 2");
  long double sum = 0;
  for (std::int64_t d = truncation; d >= 2; --d) {  // small terms first
    const long double w = static_cast<long double>(d) * static_cast<long double>(d - 1);
    sum += std::log(w) / w;
  }
  const double big_d = static_cast<double>(truncation);
  // The summand is decreasing. Above: integral of 2 log t/(t-1)^2 from D.
  // Below: 2 log t/t^2 - 1/(t-1)^3 summed from D + 1.
  const double upper_tail =
      2 * std::log(big_d) / (big_d - 1) + 2 * std::log(big_d / (big_d - 1));
  const double lower_tail = std::max(
      0.0, 2 * (std::log(big_d + 1) + 1) / (big_d + 1) - 1 / (big_d * big_d * big_d) -
               1 / (2 * big_d * big_d));
  SeriesEnclosure out;
  out.truncation = truncation;
  out.partial = static_cast<double>(sum);
  out.lower = std::nextafter(out.partial + lower_tail, 0.0);
  out.upper = std::nextafter(out.partial + upper_tail, 4.0);
  return out;
}

double integrate_one_minus(double (*cdf)(double), std::int64_t pieces) {
  if (pieces < 1) throw DomainError("pieces must be >= 1");
  const double node = 0.5 / std::sqrt(3.0);
  long double integral_f = 0;
  for (std::int64_t k = pieces - 1; k >= 1; --k) {
    const double a = 1.0 / static_cast<double>(k + 1);
    const double b = 1.0 / static_cast<double>(k);
    const double mid = 0.5 * (a + b), h = b - a;
    integral_f += 0.5L * h * (cdf(mid - node * h) + cdf(mid + node * h));
  }
  const double rest = 1.0 / static_cast<double>(pieces);
  integral_f += 0.5L * rest * cdf(rest);
  return static_cast<double>(1.0L - integral_f);
}

}  // namespace rluroth
