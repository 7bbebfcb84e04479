#pragma once

#include "rluroth/core.hpp"

#include <Eigen/Core>

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

namespace rluroth {

/// A cell image under some branch fails to be a union of cells.
class NotMarkov : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The fixed-point equation has no unique normalised solution.
class NonUniqueFixedPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PointOrigin : std::uint8_t { Critical, Orbit };

/// Image of one open cell under the map selected by one omega bit: the
/// cells [first, last) it covers and the absolute slope.
/// The image of one cell: it covers points[first] .. points[last].
struct CellImage {
  std::size_t first = 0;
  std::size_t last = 0;
  std::int64_t digit = 2;
  Branch branch = Branch::Luroth;
  BigInt slope;
};

struct MarkovPartition {
  BigRational c;
  std::vector<BigRational> points;  ///< c = points[0] < ... < points.back() = 1
  std::vector<PointOrigin> origin;
  std::vector<std::array<CellImage, 2>> images;  ///< per cell, per omega bit

  std::size_t cells() const { return points.size() - 1; }
  BigRational length(std::size_t cell) const { return points[cell + 1] - points[cell]; }
};

inline constexpr std::size_t kDefaultPointCap = 10000;

/// Critical points plus the closed random orbits of c and 1 - c. The Markov
/// property is checked cell by cell; NotMarkov is thrown if it fails.
MarkovPartition markov_points(const BigRational& c, std::size_t cap = kDefaultPointCap);

template <class T>
using DenseMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using DenseVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// M(J, I) = sum_j p_j [J inside T_j(I)] / slope, acting on cell values.
template <class T>
DenseMatrix<T> transfer_matrix(const MarkovPartition& partition, const T& p);

/// Piecewise constant on [points[i], points[i+1]); the last cell is closed.
template <class T>
struct PiecewiseConstantDensity {
  BigRational c;
  std::vector<BigRational> breakpoints;
  std::vector<T> values;

  std::size_t pieces() const { return values.size(); }
  T operator()(const BigRational& x) const;
  /// Integral over [a, b] intersected with [c, 1].
  T mass(const BigRational& a, const BigRational& b) const;
  /// Adjacent pieces with equal values joined.
  PiecewiseConstantDensity merged(double tolerance = 0.0) const;
};

/// Exact stationary density for rational p in (0, 1), on the full partition.
PiecewiseConstantDensity<BigRational> stationary_density(const MarkovPartition& partition,
                                                         const BigRational& p);
/// Merged exact density.
PiecewiseConstantDensity<BigRational> stationary_density(const BigRational& c,
                                                         const BigRational& p);

/// Binary64 solve for real p via a full-pivot LU kernel; the residual is
/// checked against `tolerance`.
PiecewiseConstantDensity<double> stationary_density_real(const MarkovPartition& partition,
                                                         double p, double tolerance = 1e-12);
PiecewiseConstantDensity<double> stationary_density_real(const BigRational& c, double p,
                                                         double tolerance = 1e-12);

/// mu(B) - p mu(T_0^{-1} B) - (1 - p) mu(T_1^{-1} B) for every cell B of
/// `cells`, with preimages taken directly from the critical points.
template <class T>
std::vector<T> stationarity_residual(const PiecewiseConstantDensity<T>& density, const T& p,
                                     const std::vector<BigRational>& cells);

template <class T>
struct DigitFrequencies {
  std::map<std::int64_t, T> digit;     ///< pi_d
  std::map<SignDigit, T> signed_digit; ///< pi_(s,d)
};

template <class T>
DigitFrequencies<T> digit_frequencies(const PiecewiseConstantDensity<T>& density, const T& p);

/// sum_d pi_d log(d(d-1)).
template <class T>
double lyapunov_exact(const PiecewiseConstantDensity<T>& density);

double lyapunov_exact(const BigRational& c, const BigRational& p);

}  // namespace rluroth
