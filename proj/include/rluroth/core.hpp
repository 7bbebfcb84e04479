#pragma once

#include "rluroth/rational.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace rluroth {

/// Scalars the dynamics are instantiated for: exact rationals and binary64.
template <class S>
concept Scalar = std::is_same_v<S, BigRational> || std::is_same_v<S, double>;

enum class Branch : std::uint8_t { Luroth, Alternating };

/// Where a point sits relative to the two branch maps T_{0,c}, T_{1,c}.
enum class Zone : std::uint8_t {
  Switch,             ///< the two maps differ; the omega bit decides
  ForcedAlternating,  ///< both maps apply T_A
  ForcedLuroth        ///< both maps apply T_L
};

struct SignDigit {
  int s = 0;
  std::int64_t d = 2;

  friend auto operator<=>(const SignDigit&, const SignDigit&) = default;
};

std::string to_string(const SignDigit& sd);

struct Location {
  std::int64_t digit = 2;
  Zone zone = Zone::ForcedLuroth;

  friend bool operator==(const Location&, const Location&) = default;
};

/// Cutting point c and Bernoulli weight p of the random map. p is the
/// probability of the omega bit 0.
struct Params {
  BigRational c;
  BigRational p;
};

/// Throws DomainError unless 0 <= c <= 1/2 and 0 <= p <= 1 (0 < p < 1 when
/// `statistical`).
void validate(const Params& params, bool statistical = false);
void validate_cut(const BigRational& c);

struct CriticalPoints {
  BigRational z;        ///< 1/n
  BigRational z_plus;   ///< z_n + c z_n z_{n-1}; equals z for n = 1
  BigRational z_minus;  ///< z_n - c z_n z_{n+1}
};

/// z_n, z_n^+ and z_n^- for the cut c.
CriticalPoints critical_points(const BigRational& c, std::int64_t n);

/// A breakpoint carried both exactly and as its nearest double.
struct Cut {
  BigRational exact;
  double approx = 0.0;

  Cut() = default;
  explicit Cut(BigRational q) : exact(std::move(q)), approx(exact.get_d()) {}
};

/// Sign of x - cut. Doubles within 4 ulp of the cut are re-resolved exactly.
inline int compare(const BigRational& x, const Cut& cut) {
  int r = cmp(x, cut.exact);
  return (r > 0) - (r < 0);
}

inline int compare(double x, const Cut& cut) {
  const double guard =
      4.0 * (std::nextafter(cut.approx, std::numeric_limits<double>::infinity()) - cut.approx);
  const double diff = x - cut.approx;
  if (diff > guard) return 1;
  if (diff < -guard) return -1;
  int r = cmp(exact(x), cut.exact);
  return (r > 0) - (r < 0);
}

/// The breakpoint structure of [c, 1] for a fixed cut c. Every membership
/// decision in the library (maps, signs, orbit graphs, partitions and the
/// simulator) goes through `locate`.
class CutGeometry {
 public:
  explicit CutGeometry(const BigRational& c);

  const BigRational& c() const { return c_.exact; }
  double c_approx() const { return c_.approx; }
  bool unbounded() const { return c_.exact == 0; }
  /// Largest digit that occurs on [c, 1], i.e. ceil(1/c); 0 when c = 0.
  std::int64_t max_digit() const { return max_digit_; }

  Cut lower(std::int64_t n) const;         ///< z_n
  Cut plus(std::int64_t n) const;          ///< z_n^+  (n >= 2)
  Cut minus(std::int64_t n) const;         ///< z_n^-  (n >= 1)

  /// c <= x <= 1. In binary64 the lower bound is the rounded c, since maps
  /// evaluated in double round images of c to it.
  template <Scalar S>
  bool in_domain(const S& x) const {
    if constexpr (std::is_same_v<S, double>)
      return x >= c_.approx && x <= 1.0;
    else
      return x >= c_.exact && x <= 1;
  }

  /// Pulls a binary64 image back into [c, 1]; identity on exact values.
  template <Scalar S>
  S clamp(const S& x) const {
    if constexpr (std::is_same_v<S, double>)
      return x < c_.approx ? c_.approx : (x > 1.0 ? 1.0 : x);
    else
      return x;
  }

  /// Digit and zone of x. Requires in_domain(x) and x != 0.
  template <Scalar S>
  Location locate(const S& x) const;

  template <Scalar S>
  bool in_switch(const S& x) const {
    return locate(x).zone == Zone::Switch;
  }

 private:
  Cut make_lower(std::int64_t n) const;
  Cut make_plus(std::int64_t n) const;
  Cut make_minus(std::int64_t n) const;

  Location locate_exact(const BigRational& x) const;
  Location locate_binary(double x) const;

  Cut c_;
  std::int64_t max_digit_ = 0;
  std::vector<Cut> lower_, plus_, minus_;  // cached for small n
};

template <Scalar S>
Location CutGeometry::locate(const S& x) const {
  if constexpr (std::is_same_v<S, double>)
    return locate_binary(x);
  else
    return locate_exact(x);
}

void require_domain(const CutGeometry& geo, const BigRational& x, const char* what);
void require_domain(const CutGeometry& geo, double x, const char* what);

inline Branch branch_for(Zone zone, int bit) {
  switch (zone) {
    case Zone::ForcedAlternating: return Branch::Alternating;
    case Zone::ForcedLuroth: return Branch::Luroth;
    case Zone::Switch: break;
  }
  return bit == 0 ? Branch::Luroth : Branch::Alternating;
}

/// The digit-n branch of T_L (or T_A) evaluated at x.
template <Scalar S>
S apply_branch(Branch branch, std::int64_t n, const S& x) {
  if constexpr (std::is_same_v<S, double>) {
    const double dn = static_cast<double>(n);
    const double slope = dn * (dn - 1.0);
    return branch == Branch::Luroth ? std::fma(slope, x, -(dn - 1.0))
                                    : std::fma(-slope, x, dn);
  } else {
    const BigInt bn(std::to_string(n));
    BigRational lur = BigRational(bn * (bn - 1)) * x - BigRational(bn - 1);
    if (branch == Branch::Luroth) return lur;
    return BigRational(1) - lur;
  }
}

/// T_L on [0, 1]; 0 and 1 are fixed.
template <Scalar S>
S luroth_map(const S& x) {
  if (x < 0 || x > 1) throw DomainError("luroth_map: x outside [0,1]");
  if (x == 0 || x == 1) return x;
  std::int64_t n;
  if constexpr (std::is_same_v<S, double>) {
    n = static_cast<std::int64_t>(std::ceil(1.0 / x));
    while (std::fma(x, static_cast<double>(n), -1.0) < 0) ++n;
    while (n > 2 && std::fma(x, static_cast<double>(n - 1), -1.0) >= 0) --n;
  } else {
    n = to_int64(ceil(BigRational(1) / x));
  }
  return apply_branch(Branch::Luroth, n, x);
}

/// T_A = 1 - T_L.
template <Scalar S>
S alternating_map(const S& x) {
  return S(1) - luroth_map(x);
}

/// One application of T_{j,c}. x = 0 is accepted only for c = 0 and maps to 1.
template <Scalar S>
S branch_map(int bit, const CutGeometry& geo, const S& x) {
  if (x == 0 && geo.unbounded()) return S(1);
  require_domain(geo, x, "branch_map");
  const Location where = geo.locate(x);
  return geo.clamp(apply_branch(branch_for(where.zone, bit), where.digit, x));
}

template <Scalar S>
S branch_map(int bit, const BigRational& c, const S& x) {
  return branch_map(bit, CutGeometry(c), x);
}

template <Scalar S>
bool switch_contains(const CutGeometry& geo, const S& x) {
  require_domain(geo, x, "switch_contains");
  if (x == 0) return false;
  return geo.in_switch(x);
}

template <Scalar S>
bool switch_contains(const BigRational& c, const S& x) {
  return switch_contains(CutGeometry(c), x);
}

/// The symbol (s_i, d_i) read at x when the omega bit is `bit`.
template <Scalar S>
SignDigit sign_digit(int bit, const CutGeometry& geo, const S& x) {
  if (x == 0) throw DomainError("sign_digit: digits are undefined at x = 0");
  require_domain(geo, x, "sign_digit");
  const Location where = geo.locate(x);
  const Branch b = branch_for(where.zone, bit);
  return SignDigit{b == Branch::Alternating ? 1 : 0, where.digit};
}

template <Scalar S>
SignDigit sign_digit(int bit, const BigRational& c, const S& x) {
  return sign_digit(bit, CutGeometry(c), x);
}

/// Everything produced by one step of L_c.
template <Scalar S>
struct Step {
  S next;
  SignDigit symbol;
  Branch branch = Branch::Luroth;
  Zone zone = Zone::ForcedLuroth;
};

template <Scalar S>
Step<S> step(int bit, const CutGeometry& geo, const S& x) {
  if (x == 0) throw DomainError("step: digits are undefined at x = 0");
  require_domain(geo, x, "step");
  const Location where = geo.locate(x);
  const Branch b = branch_for(where.zone, bit);
  return Step<S>{geo.clamp(apply_branch(b, where.digit, x)),
                 SignDigit{b == Branch::Alternating ? 1 : 0, where.digit}, b, where.zone};
}

template <Scalar S>
struct KStep {
  S next;
  bool omega_consumed = false;
};

/// One step of K_c: the omega bit is only read (and consumed) inside S.
template <Scalar S>
KStep<S> k_step(int bit, const CutGeometry& geo, const S& x) {
  if (geo.unbounded()) throw DomainError("k_step: requires c > 0");
  require_domain(geo, x, "k_step");
  const Location where = geo.locate(x);
  const bool consumed = where.zone == Zone::Switch;
  return KStep<S>{geo.clamp(apply_branch(branch_for(where.zone, bit), where.digit, x)), consumed};
}

/// q_n |x - p_n/q_n| expressed through the previous orbit point.
template <Scalar S>
S theta(Branch branch, std::int64_t d, const S& x_prev) {
  if (d < 2) throw DomainError("theta: digit must be >= 2");
  if constexpr (std::is_same_v<S, double>) {
    const double dd = static_cast<double>(d);
    return branch == Branch::Luroth ? dd * x_prev - 1.0 : 1.0 - (dd - 1.0) * x_prev;
  } else {
    const BigInt bd(std::to_string(d));
    if (branch == Branch::Luroth) return BigRational(BigRational(bd) * x_prev - 1);
    return BigRational(1 - BigRational(bd - 1) * x_prev);
  }
}

// ---------------------------------------------------------------------------
// Digit sequences

void validate_digits(std::span<const SignDigit> digits);

/// d(d-1) as an exact integer.
BigInt digit_weight(std::int64_t d);

/// Exact partial sum of the generalised Luroth series over a finite prefix.
BigRational psi_prefix(std::span<const SignDigit> digits);

/// Exact value of pre . period^infinity by geometric closure.
BigRational psi_periodic(std::span<const SignDigit> pre, std::span<const SignDigit> period);

struct PsiLimit {
  BigRational value;       ///< partial sum over the terms used
  BigRational tail_bound;  ///< prod 1/(d_i(d_i-1)) over the terms used
  std::size_t terms = 0;
};

inline constexpr double kPsiDefaultTolerance = 0x1p-60;

/// Sums the series until the rigorous tail bound drops below `tolerance`.
/// Throws DomainError when the digits run out first.
PsiLimit psi_limit(std::span<const SignDigit> digits, double tolerance = kPsiDefaultTolerance);

struct Convergent {
  BigInt p;
  BigInt q;
};

/// p_n / q_n with q_n = (d_n - s_n) prod_{i<n} d_i(d_i-1). Not reduced.
Convergent convergent(std::span<const SignDigit> prefix);

/// All convergents of a digit sequence, computed incrementally.
std::vector<Convergent> convergents(std::span<const SignDigit> digits);

}  // namespace rluroth
