#pragma once

#include <cstdint>

namespace rluroth {

inline constexpr double kZeta2 = 1.6449340668482264;  // pi^2 / 6

/// H_m = 1 + 1/2 + ... + 1/m (H_0 = 0), summed directly for small m and by
/// the asymptotic expansion otherwise.
double harmonic(std::int64_t m);

/// Limiting CDF of theta for the Luroth map: z (H_{m+1} - 1) + 1/(m+1), m = floor(1/z).
double f_luroth(double z);
/// Limiting CDF of theta for the alternating map: z H_{m-1} + 1/m.
double f_alternating(double z);
/// p F_L + (1 - p) F_A.
double f_theta(double z, double p);

/// Mean approximation coefficient p (2 zeta(2) - 3)/2 + (2 - zeta(2))/2.
double m_p(double p);

inline double m_luroth() { return kZeta2 / 2 - 0.5; }
inline double m_alternating() { return 1.0 - kZeta2 / 2; }

/// Sum of log(d(d-1))/(d(d-1)) over 2 <= d <= D, with an enclosure of the
/// full series from integral tail bounds.
struct SeriesEnclosure {
  std::int64_t truncation = 2;
  double partial = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

SeriesEnclosure luroth_series_lyapunov(std::int64_t truncation);

/// Integral of 1 - F over [0, 1] by two-point Gauss-Legendre on each
/// [1/(k+1), 1/k], k < pieces; the remainder [0, 1/pieces] is bounded by
/// F(1/pieces)/pieces and split evenly.
double integrate_one_minus(double (*cdf)(double), std::int64_t pieces = 1000000);

}  // namespace rluroth
