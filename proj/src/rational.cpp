#include "rluroth/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace rluroth {

BigRational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  BigRational q(num, den);
  q.canonicalize();
  return q;
}

BigRational make_rational(std::int64_t num, std::int64_t den) {
  return make_rational(BigInt(std::to_string(num)), BigInt(std::to_string(den)));
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  return true;
}

BigInt parse_integer(std::string_view s) {
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (!all_digits(body)) throw DomainError("not an integer: '" + std::string(s) + "'");
  std::string text(s.front() == '+' ? s.substr(1) : s);
  return BigInt(text, 10);
}

BigRational parse_decimal(std::string_view s) {
  std::string_view mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = s.substr(0, e);
    BigInt ez = parse_integer(s.substr(e + 1));
    if (!ez.fits_slong_p() || std::abs(ez.get_si()) > 100000)
      throw DomainError("exponent out of range: '" + std::string(s) + "'");
    exponent = ez.get_si();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mantissa.substr(0, dot);
    std::string_view fp = mantissa.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) ||
        (!fp.empty() && !all_digits(fp)))
      throw DomainError("not a number: '" + std::string(s) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!all_digits(mantissa)) throw DomainError("not a number: '" + std::string(s) + "'");
    digits = std::string(mantissa);
  }
  BigInt num(digits, 10);
  if (negative) num = -num;
  long scale = exponent - frac_digits;
  BigInt pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(scale)));
  return scale >= 0 ? make_rational(num * pow10, BigInt(1)) : make_rational(num, pow10);
}

}  // namespace

BigRational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw DomainError("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash));
    BigInt den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator: '" + std::string(text) + "'");
    return make_rational(num, den);
  }
  return parse_decimal(text);
}

BigRational nearest_rational(double value, std::int64_t max_den) {
  if (!std::isfinite(value)) throw DomainError("cannot approximate a non-finite value");
  if (max_den < 1) throw DomainError("max_den must be positive");
  // Continued-fraction convergents of the exact binary value, then the best
  // semiconvergent under the bound.
  const BigRational target = exact(value);
  const BigInt bound(std::to_string(max_den));
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  BigRational rest = target;
  while (true) {
    BigInt a = floor(rest);
    BigInt p2 = a * p1 + p0;
    BigInt q2 = a * q1 + q0;
    if (q2 > bound) {
      BigInt k = (bound - q0) / q1;
      BigRational semi = make_rational(k * p1 + p0, k * q1 + q0);
      BigRational conv = make_rational(p1, q1);
      return abs(semi - target) < abs(conv - target) ? semi : conv;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    BigRational frac = rest - BigRational(a);
    if (frac == 0) return make_rational(p1, q1);
    rest = 1 / frac;
  }
}

std::string to_fraction_string(const BigRational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

BigInt ceil(const BigRational& q) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

BigInt floor(const BigRational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

std::int64_t to_int64(const BigInt& z) {
  if (!z.fits_slong_p() || sizeof(long) < sizeof(std::int64_t))
    throw DomainError("integer exceeds 64-bit range: " + z.get_str());
  return static_cast<std::int64_t>(z.get_si());
}

}  // namespace rluroth
