#include "rluroth/core.hpp"
#include "rluroth/expansion.hpp"

#include <algorithm>
#include <stdexcept>

namespace rluroth {

namespace {

constexpr std::int64_t kCachedDigits = 4096;

BigInt big(std::int64_t v) { return BigInt(std::to_string(v)); }

}  // namespace

std::string to_string(const SignDigit& sd) {
  return "(" + std::to_string(sd.s) + "," + std::to_string(sd.d) + ")";
}

void validate_cut(const BigRational& c) {
  if (c < 0 || c > BigRational(1, 2))
    throw DomainError("c must lie in [0, 1/2], got " + to_fraction_string(c));
}

void validate(const Params& params, bool statistical) {
  validate_cut(params.c);
  if (statistical ? (params.p <= 0 || params.p >= 1) : (params.p < 0 || params.p > 1))
    throw DomainError(std::string("p must lie in ") + (statistical ? "(0, 1)" : "[0, 1]") +
                      ", got " + to_fraction_string(params.p));
}

CriticalPoints critical_points(const BigRational& c, std::int64_t n) {
  validate_cut(c);
  if (n < 1) throw DomainError("critical_points: n must be >= 1");
  CriticalPoints out;
  out.z = make_rational(1, n);
  out.z_plus = n >= 2 ? BigRational(out.z + c * out.z / big(n - 1)) : out.z;
  out.z_minus = out.z - c * out.z / big(n + 1);
  return out;
}

CutGeometry::CutGeometry(const BigRational& c) : c_(c) {
  validate_cut(c);
  if (c > 0) max_digit_ = to_int64(ceil(BigRational(1) / c));
  const std::int64_t top =
      std::min<std::int64_t>(max_digit_ > 0 ? max_digit_ + 1 : kCachedDigits, kCachedDigits);
  lower_.reserve(top + 1);
  plus_.reserve(top + 1);
  minus_.reserve(top + 1);
  for (std::int64_t n = 0; n <= top; ++n) {
    lower_.push_back(n >= 1 ? make_lower(n) : Cut());
    plus_.push_back(n >= 2 ? make_plus(n) : Cut());
    minus_.push_back(n >= 1 ? make_minus(n) : Cut());
  }
}

Cut CutGeometry::make_lower(std::int64_t n) const { return Cut(make_rational(1, n)); }

Cut CutGeometry::make_plus(std::int64_t n) const {
  return Cut(make_rational(1, n) + c_.exact * make_rational(1, n * (n - 1)));
}

Cut CutGeometry::make_minus(std::int64_t n) const {
  return Cut(make_rational(1, n) - c_.exact * make_rational(1, n * (n + 1)));
}

Cut CutGeometry::lower(std::int64_t n) const {
  return n < static_cast<std::int64_t>(lower_.size()) ? lower_[n] : make_lower(n);
}

Cut CutGeometry::plus(std::int64_t n) const {
  return n < static_cast<std::int64_t>(plus_.size()) ? plus_[n] : make_plus(n);
}

Cut CutGeometry::minus(std::int64_t n) const {
  return n < static_cast<std::int64_t>(minus_.size()) ? minus_[n] : make_minus(n);
}

Location CutGeometry::locate_exact(const BigRational& x) const {
  if (x == 1) return {2, Zone::ForcedLuroth};
  const std::int64_t n = to_int64(ceil(BigRational(1) / x));
  if (c_.exact == 0) {
    const bool at_point = x.get_num() == 1 && x.get_den() == big(n);
    return {n, at_point ? Zone::ForcedAlternating : Zone::Switch};
  }
  if (compare(x, plus(n)) < 0) return {n, Zone::ForcedAlternating};
  if (compare(x, minus(n - 1)) <= 0) return {n, Zone::Switch};
  return {n, Zone::ForcedLuroth};
}

Location CutGeometry::locate_binary(double x) const {
  if (x == 1.0) return {2, Zone::ForcedLuroth};
  const double r = 1.0 / x;
  if (!(r < 0x1p53)) throw DomainError("point too close to 0 for binary64 digit extraction");
  // x >= 1/n  <=>  fma(x, n, -1) >= 0, and the fused result has the exact sign.
  auto at_or_above = [x](std::int64_t n) { return std::fma(x, static_cast<double>(n), -1.0); };
  std::int64_t n = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(r)));
  if (max_digit_ > 0) n = std::min(n, max_digit_);
  while ((max_digit_ == 0 || n < max_digit_) && at_or_above(n) < 0) ++n;
  while (n > 2 && at_or_above(n - 1) >= 0) --n;
  if (max_digit_ == 0) return {n, at_or_above(n) == 0 ? Zone::ForcedAlternating : Zone::Switch};
  if (compare(x, plus(n)) < 0) return {n, Zone::ForcedAlternating};
  if (compare(x, minus(n - 1)) <= 0) return {n, Zone::Switch};
  return {n, Zone::ForcedLuroth};
}

void require_domain(const CutGeometry& geo, const BigRational& x, const char* what) {
  if (!geo.in_domain(x))
    throw DomainError(std::string(what) + ": x = " + to_fraction_string(x) + " outside [" +
                      to_fraction_string(geo.c()) + ", 1]");
}

void require_domain(const CutGeometry& geo, double x, const char* what) {
  if (!geo.in_domain(x))
    throw DomainError(std::string(what) + ": x = " + std::to_string(x) + " outside [c, 1]");
}

// ---------------------------------------------------------------------------

void validate_digits(std::span<const SignDigit> digits) {
  for (const auto& sd : digits) {
    if (sd.d < 2) throw DomainError("digit must be >= 2, got " + std::to_string(sd.d));
    if (sd.s != 0 && sd.s != 1) throw DomainError("sign must be 0 or 1");
  }
}

BigInt digit_weight(std::int64_t d) {
  const BigInt bd = big(d);
  return bd * (bd - 1);
}

namespace {

/// Running state of the series: value = numer / prod, and the parity of the
/// signs read so far.
struct SeriesAccumulator {
  BigInt numer = 0;
  BigInt prod = 1;
  int parity = 0;

  void push(const SignDigit& sd) {
    const BigInt w = digit_weight(sd.d);
    const BigInt term = big(sd.d - 1 + sd.s);
    numer = numer * w + (parity ? BigInt(-term) : term);
    prod *= w;
    parity ^= sd.s;
  }

  BigRational value() const { return make_rational(numer, prod); }
};

}  // namespace

BigRational psi_prefix(std::span<const SignDigit> digits) {
  if (digits.empty()) throw DomainError("psi: empty digit sequence");
  validate_digits(digits);
  SeriesAccumulator acc;
  for (const auto& sd : digits) acc.push(sd);
  return acc.value();
}

BigRational psi_periodic(std::span<const SignDigit> pre, std::span<const SignDigit> period) {
  if (period.empty()) throw DomainError("psi: empty period");
  validate_digits(pre);
  validate_digits(period);
  // y = A + sigma y / P  for the purely periodic tail.
  SeriesAccumulator tail;
  for (const auto& sd : period) tail.push(sd);
  const BigInt sigma = tail.parity ? -1 : 1;
  const BigRational y = make_rational(tail.numer, tail.prod - sigma);
  SeriesAccumulator head;
  for (const auto& sd : pre) head.push(sd);
  const BigRational scaled = y / BigRational(head.prod);
  return head.value() + (head.parity ? BigRational(-scaled) : scaled);
}

PsiLimit psi_limit(std::span<const SignDigit> digits, double tolerance) {
  if (digits.empty()) throw DomainError("psi: empty digit sequence");
  if (!(tolerance > 0)) throw DomainError("psi: tolerance must be positive");
  validate_digits(digits);
  const BigRational tol = exact(tolerance);
  SeriesAccumulator acc;
  PsiLimit out;
  for (const auto& sd : digits) {
    acc.push(sd);
    ++out.terms;
    if (BigRational(1) / BigRational(acc.prod) < tol) {
      out.value = acc.value();
      out.tail_bound = make_rational(BigInt(1), acc.prod);
      return out;
    }
  }
  throw DomainError("psi: digits exhausted before the tail bound reached the tolerance");
}

namespace {

Convergent convergent_step(const SeriesAccumulator& before, const SeriesAccumulator& after,
                           const SignDigit& last) {
  Convergent c;
  c.q = big(last.d - last.s) * before.prod;
  // p = q * numer / prod = (d - s) numer / (d (d - 1)), always integral.
  const BigInt scaled = big(last.d - last.s) * after.numer;
  const BigInt w = digit_weight(last.d);
  if (!mpz_divisible_p(scaled.get_mpz_t(), w.get_mpz_t()))
    throw std::logic_error("convergent numerator is not integral");
  c.p = scaled / w;
  return c;
}

}  // namespace

Convergent convergent(std::span<const SignDigit> prefix) {
  if (prefix.empty()) throw DomainError("convergent: empty prefix");
  validate_digits(prefix);
  SeriesAccumulator acc;
  for (std::size_t i = 0; i + 1 < prefix.size(); ++i) acc.push(prefix[i]);
  SeriesAccumulator after = acc;
  after.push(prefix.back());
  return convergent_step(acc, after, prefix.back());
}

std::vector<Convergent> convergents(std::span<const SignDigit> digits) {
  validate_digits(digits);
  std::vector<Convergent> out;
  out.reserve(digits.size());
  SeriesAccumulator acc;
  for (const auto& sd : digits) {
    SeriesAccumulator after = acc;
    after.push(sd);
    out.push_back(convergent_step(acc, after, sd));
    acc = std::move(after);
  }
  return out;
}

// ---------------------------------------------------------------------------

template <Scalar S>
ExpansionRecord<S> expand(OmegaSource& source, const S& x, const CutGeometry& geo,
                          std::size_t n_steps) {
  if (n_steps < 1) throw DomainError("expand: n_steps must be >= 1");
  if (x == 0) throw DomainError("expand: digits are undefined at x = 0");
  require_domain(geo, x, "expand");

  ExpansionRecord<S> rec;
  rec.start = x;
  rec.omega_used.reserve(n_steps);
  rec.digits.reserve(n_steps);
  rec.orbit.reserve(n_steps);
  rec.convergents.reserve(n_steps);
  rec.thetas.reserve(n_steps);

  SeriesAccumulator acc;
  S cur = x;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const int bit = source.next();
    const Step<S> st = step(bit, geo, cur);
    SeriesAccumulator after = acc;
    after.push(st.symbol);
    rec.omega_used.push_back(bit);
    rec.digits.push_back(st.symbol);
    rec.branches.push_back(st.branch);
    rec.convergents.push_back(convergent_step(acc, after, st.symbol));
    rec.thetas.push_back(to_double(theta(st.branch, st.symbol.d, cur)));
    rec.orbit.push_back(st.next);
    acc = std::move(after);
    cur = st.next;
  }
  return rec;
}

template ExpansionRecord<BigRational> expand(OmegaSource&, const BigRational&, const CutGeometry&,
                                             std::size_t);
template ExpansionRecord<double> expand(OmegaSource&, const double&, const CutGeometry&,
                                        std::size_t);

}  // namespace rluroth
