#pragma once

#include <gmpxx.h>

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rluroth {

/// Arbitrary-precision integer.
using BigInt = mpz_class;

/// Arbitrary-precision rational, canonical (reduced, positive denominator)
/// after every arithmetic operation.
using BigRational = mpq_class;

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a finite closure exceeds its node cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BigRational make_rational(const BigInt& num, const BigInt& den);
BigRational make_rational(std::int64_t num, std::int64_t den = 1);

/// Parses "P/Q", an integer, or a finite decimal ("0.375", "-2.5e-3") exactly.
BigRational parse_rational(std::string_view text);

/// Best rational approximation of `value` with denominator at most `max_den`.
BigRational nearest_rational(double value, std::int64_t max_den);

/// Always "num/den", including integers ("1/1").
std::string to_fraction_string(const BigRational& q);

/// The exact binary value of a double.
inline BigRational exact(double x) { return BigRational(x); }

inline double to_double(const BigRational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// Smallest integer >= q.
BigInt ceil(const BigRational& q);
/// Largest integer <= q.
BigInt floor(const BigRational& q);

/// Narrowing with a domain check.
std::int64_t to_int64(const BigInt& z);

}  // namespace rluroth

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;
  using Literal = mpq_class;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };

  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
