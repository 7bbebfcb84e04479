#include "oracles.hpp"

#include "rluroth/core.hpp"
#include "rluroth/expansion.hpp"
#include "rluroth/omega.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rluroth;
using Q = BigRational;

namespace {

Q q(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

std::vector<SignDigit> digits_of(const ExpansionRecord<Q>& rec) { return rec.digits; }

const std::vector<Q> kCuts = {q(0), q(1, 2), q(1, 3), q(2, 5), q(1, 4), q(1, 7), q(3, 10), q(1, 8), q(5, 12)};

}  // namespace

TEST_CASE("luroth and alternating maps") {
  CHECK(luroth_map(q(1)) == 1);
  CHECK(luroth_map(q(0)) == 0);
  CHECK(luroth_map(q(3, 4)) == q(1, 2));
  CHECK(alternating_map(q(0)) == 1);
  CHECK(alternating_map(q(3, 4)) == q(1, 2));
  CHECK(alternating_map(q(1, 2)) == 1);
  CHECK_THROWS_AS(luroth_map(q(3, 2)), DomainError);
  CHECK_THROWS_AS(alternating_map(q(-1, 2)), DomainError);
  CHECK(luroth_map(0.75) == 0.5);
}

TEST_CASE("maps are conjugate on random rationals") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 500; ++i) {
    const Q x = oracle::random_rational(gen, q(0), 200);
    CHECK(alternating_map(x) + luroth_map(x) == 1);
    const std::int64_t n = oracle::digit_of(x);
    if (x != 1) CHECK(luroth_map(x) == q(n * (n - 1)) * x - q(n - 1));
  }
}

TEST_CASE("critical points") {
  const auto a = critical_points(q(1, 4), 2);
  CHECK(a.z_plus == q(5, 8));
  CHECK(a.z_minus == q(11, 24));
  CHECK(critical_points(q(1, 3), 2).z_plus == q(2, 3));
  for (std::int64_t n = 2; n < 12; ++n) {
    const auto z = critical_points(q(0), n);
    CHECK(z.z == q(1, n));
    CHECK(z.z_plus == z.z);
    CHECK(z.z_minus == z.z);
  }
  for (const Q& c : kCuts) {
    for (std::int64_t n = 2; n < 20; ++n) {
      const auto here = critical_points(c, n);
      const auto above = critical_points(c, n - 1);
      CHECK(here.z <= here.z_plus);
      CHECK(here.z_plus <= above.z_minus);
      CHECK(above.z_minus <= above.z);
    }
  }
}

TEST_CASE("switch region") {
  CHECK(switch_contains(q(1, 3), q(5, 7)));
  CHECK_FALSE(switch_contains(q(1, 3), q(6, 7)));
  CHECK_FALSE(switch_contains(q(0), q(1, 2)));
  CHECK_THROWS_AS(switch_contains(q(1, 3), q(1, 4)), DomainError);
  std::mt19937_64 gen(12);
  for (const Q& c : kCuts) {
    for (int i = 0; i < 300; ++i) {
      const Q x = oracle::random_rational(gen, c, 300);
      CHECK(switch_contains(c, x) == oracle::in_switch(c, x));
    }
  }
}

TEST_CASE("branch maps") {
  CHECK(branch_map(0, q(1, 3), q(5, 7)) == q(3, 7));
  CHECK(branch_map(1, q(1, 3), q(5, 7)) == q(4, 7));
  CHECK(branch_map(0, q(1, 4), q(1, 4)) == 1);
  CHECK(branch_map(0, q(0), q(0)) == 1);
  CHECK_THROWS_AS(branch_map(0, q(1, 3), q(1, 5)), DomainError);
  for (std::int64_t n = 2; n < 9; ++n) {
    for (const Q& c : kCuts) {
      if (q(1, n) < c) continue;
      CHECK(branch_map(0, c, q(1, n)) == 1);
      CHECK(branch_map(1, c, q(1, n)) == 1);
    }
  }
}

TEST_CASE("branch maps agree with the naive oracle and stay in range") {
  std::mt19937_64 gen(13);
  for (const Q& c : kCuts) {
    const CutGeometry geo(c);
    for (int i = 0; i < 400; ++i) {
      const Q x = oracle::random_rational(gen, c, 500);
      for (int j = 0; j < 2; ++j) {
        const auto want = oracle::step(j, c, x);
        const Q got = branch_map(j, geo, x);
        CHECK(got == want.next);
        CHECK(got >= c);
        CHECK(got <= 1);
        CHECK(got != 0);
        const SignDigit sd = sign_digit(j, geo, x);
        CHECK(sd.s == want.s);
        CHECK(sd.d == want.d);
      }
      if (!oracle::in_switch(c, x)) CHECK(branch_map(0, geo, x) == branch_map(1, geo, x));
    }
  }
}

TEST_CASE("binary64 path matches the exact path") {
  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Q& c : kCuts) {
    const CutGeometry geo(c);
    const double lo = c.get_d();
    for (int i = 0; i < 2000; ++i) {
      double x = lo + (1.0 - lo) * u(gen);
      if (x < lo || x == 0) continue;
      if (exact(x) < c) continue;
      for (int j = 0; j < 2; ++j) {
        const SignDigit a = sign_digit(j, geo, x);
        const SignDigit b = sign_digit(j, geo, exact(x));
        CHECK(a == b);
      }
    }
    // Dyadic breakpoints are representable; the guard band must resolve them exactly.
    for (std::int64_t n = 2; n < 40; ++n) {
      for (const Q& b : {geo.lower(n).exact, geo.plus(n).exact, geo.minus(n - 1).exact}) {
        if (b < c || b > 1 || exact(b.get_d()) != b) continue;
        for (int j = 0; j < 2; ++j) CHECK(sign_digit(j, geo, b.get_d()) == sign_digit(j, geo, b));
      }
    }
  }
}

TEST_CASE("sign digits") {
  CHECK(sign_digit(0, q(1, 3), q(6, 7)) == SignDigit{0, 2});
  CHECK(sign_digit(1, q(1, 3), q(5, 7)) == SignDigit{1, 2});
  for (const Q& c : kCuts)
    for (int j = 0; j < 2; ++j) CHECK(sign_digit(j, c, q(1)) == SignDigit{0, 2});
  CHECK_THROWS_AS(sign_digit(0, q(0), q(0)), DomainError);
}

TEST_CASE("admissibility of emitted symbols") {
  std::mt19937_64 gen(15);
  for (const Q& c : kCuts) {
    if (c == 0) continue;
    for (int i = 0; i < 300; ++i) {
      const Q x = oracle::random_rational(gen, c, 400);
      for (int j = 0; j < 2; ++j) {
        const SignDigit sd = sign_digit(j, c, x);
        const auto z = critical_points(c, sd.d);
        const auto up = critical_points(c, sd.d - 1);
        if (sd.s == 0) {
          CHECK(x >= z.z_plus);
          CHECK(x <= up.z);
        } else {
          CHECK(x >= z.z);
          CHECK(x <= up.z_minus);
        }
      }
    }
  }
}

TEST_CASE("expansions of Table 1 and Example 2.8") {
  auto a = OmegaSource::parse("(011)");
  const auto rec = expand(a, q(6, 7), CutGeometry(q(1, 3)), 6);
  CHECK(digits_of(rec) == std::vector<SignDigit>{{0, 2}, {1, 2}, {1, 2}, {0, 2}, {1, 2}, {1, 2}});
  auto b2 = OmegaSource::parse("00(1)");
  const auto rec2 = expand(b2, q(6, 7), CutGeometry(q(1, 3)), 5);
  CHECK(digits_of(rec2) == std::vector<SignDigit>{{0, 2}, {0, 2}, {1, 3}, {1, 3}, {1, 3}});
  for (const char* w : {"000", "111", "010"}) {
    auto o = OmegaSource::parse(w);
    const auto r = expand(o, q(3, 4), CutGeometry(q(1, 3)), 3);
    CHECK(r.orbit == std::vector<Q>{q(1, 2), q(1), q(1)});
  }
  auto c = OmegaSource::parse("111");
  CHECK(digits_of(expand(c, q(3, 4), CutGeometry(q(1, 3)), 3)) ==
        std::vector<SignDigit>{{1, 2}, {1, 2}, {0, 2}});
}

TEST_CASE("expand errors") {
  auto w = OmegaSource::parse("01");
  CHECK_THROWS_AS(expand(w, q(6, 7), CutGeometry(q(1, 3)), 5), OmegaExhausted);
  auto z = OmegaSource::parse("(0)");
  CHECK_THROWS_AS(expand(z, q(0), CutGeometry(q(0)), 3), DomainError);
  auto y = OmegaSource::parse("(0)");
  CHECK_THROWS_AS(expand(y, q(1, 4), CutGeometry(q(1, 3)), 3), DomainError);
}

TEST_CASE("k_step") {
  const CutGeometry geo(q(1, 3));
  const auto a = k_step(1, geo, q(5, 7));
  CHECK(a.next == q(4, 7));
  CHECK(a.omega_consumed);
  for (int j = 0; j < 2; ++j) {
    const auto b = k_step(j, geo, q(6, 7));
    CHECK(b.next == q(5, 7));
    CHECK_FALSE(b.omega_consumed);
    const auto c = k_step(j, CutGeometry(q(1, 4)), q(1));
    CHECK(c.next == 1);
    CHECK_FALSE(c.omega_consumed);
  }
  CHECK_THROWS_AS(k_step(0, CutGeometry(q(0)), q(1, 2)), DomainError);
}

TEST_CASE("psi") {
  const std::vector<SignDigit> none;
  CHECK(psi_periodic(none, std::vector<SignDigit>{{0, 2}}) == 1);
  CHECK(psi_periodic(none, std::vector<SignDigit>{{0, 2}, {1, 2}, {1, 2}}) == q(6, 7));
  CHECK(psi_periodic(std::vector<SignDigit>{{1, 2}}, std::vector<SignDigit>{{0, 2}}) == q(1, 2));
  CHECK(psi_periodic(std::vector<SignDigit>{{0, 3}}, std::vector<SignDigit>{{0, 2}}) == q(1, 2));
  CHECK(psi_periodic(std::vector<SignDigit>{{0, 2}, {0, 2}}, std::vector<SignDigit>{{1, 3}}) ==
        q(6, 7));
  const auto lim = psi_limit(std::vector<SignDigit>(80, SignDigit{0, 2}));
  CHECK(lim.tail_bound <= Q(std::ldexp(1.0, -60)));
  CHECK(abs(lim.value - 1) <= lim.tail_bound);
}

TEST_CASE("psi closure against long exact prefixes") {
  std::mt19937_64 gen(16);
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<std::int64_t> dig(2, 6);
  for (int i = 0; i < 100; ++i) {
    std::vector<SignDigit> pre(static_cast<std::size_t>(bit(gen) + bit(gen)));
    std::vector<SignDigit> period(static_cast<std::size_t>(1 + bit(gen) + bit(gen)));
    for (auto& sd : pre) sd = {bit(gen), dig(gen)};
    for (auto& sd : period) sd = {bit(gen), dig(gen)};
    std::vector<SignDigit> seq = pre;
    while (seq.size() < 120) seq.insert(seq.end(), period.begin(), period.end());
    const Q closed = psi_periodic(pre, period);
    const auto lim = psi_limit(seq, 1e-30);
    CHECK(abs(closed - lim.value) <= lim.tail_bound);
  }
}

TEST_CASE("convergents") {
  const auto a = convergent(std::vector<SignDigit>{{0, 2}});
  CHECK(a.p == 1);
  CHECK(a.q == 2);
  const auto b = convergent(std::vector<SignDigit>{{1, 2}});
  CHECK(b.p == 1);
  CHECK(b.q == 1);
  // q_2 = (d_2 - s_2) d_1(d_1 - 1) = 2 under the displayed convention; the
  // partial sum 1/2 + 2/4 = 1 makes p_2 = 2 an integer.
  const auto c = convergent(std::vector<SignDigit>{{0, 2}, {1, 2}});
  CHECK(c.q == 2);
  CHECK(c.p == 2);
}

TEST_CASE("expansion identities on random exact orbits") {
  std::mt19937_64 gen(17);
  for (const Q& c : kCuts) {
    const CutGeometry geo(c);
    for (int i = 0; i < 40; ++i) {
      const Q x = oracle::random_rational(gen, c, 1000);
      auto omega = OmegaSource::bernoulli(0.5, gen());
      const auto rec = expand(omega, x, geo, 25);
      BigInt prod = 1;
      int parity = 0;
      Q prev = x;
      for (std::size_t n = 0; n < rec.size(); ++n) {
        const SignDigit sd = rec.digits[n];
        const auto want = oracle::step(rec.omega_used[n], c, prev);
        CHECK(want.next == rec.orbit[n]);
        CHECK(want.s == sd.s);
        CHECK(want.d == sd.d);
        if (oracle::in_switch(c, prev)) CHECK(sd.s == rec.omega_used[n]);
        const BigInt q_expected = BigInt(sd.d - sd.s) * prod;
        CHECK(rec.convergents[n].q == q_expected);
        prod *= BigInt(sd.d * (sd.d - 1));
        parity ^= sd.s;
        const std::vector<SignDigit> prefix(rec.digits.begin(), rec.digits.begin() + n + 1);
        const Q pq = make_rational(rec.convergents[n].p, rec.convergents[n].q);
        CHECK(psi_prefix(prefix) == pq);
        const Q gap = x - pq;
        const Q tail = rec.orbit[n] / Q(prod);
        CHECK(gap == (parity ? Q(-tail) : tail));
        // theta_n from the recursion equals q_n |x - p_n/q_n|
        const Q theta_exact = theta(rec.branches[n], sd.d, prev);
        CHECK(theta_exact == Q(rec.convergents[n].q) * abs(gap));
        CHECK(rec.thetas[n] == theta_exact.get_d());
        CHECK(rec.thetas[n] >= 0);
        CHECK(rec.thetas[n] <= 1);
        prev = rec.orbit[n];
      }
    }
  }
}

TEST_CASE("theta") {
  CHECK(theta(Branch::Luroth, 2, q(6, 7)) == q(5, 7));
  CHECK(theta(Branch::Alternating, 2, q(6, 7)) == q(1, 7));
  CHECK(theta(Branch::Luroth, 2, q(1, 2)) == 0);
  CHECK(theta(Branch::Luroth, 2, 6.0 / 7) == doctest::Approx(5.0 / 7));
  CHECK(2 * abs(q(6, 7) - q(1, 2)) == q(5, 7));
  auto omega = OmegaSource::parse("(0)");
  const auto rec = expand(omega, q(1), CutGeometry(q(0)), 20);
  for (double t : rec.thetas) CHECK(t == 1.0);
}

TEST_CASE("omega sources") {
  auto a = OmegaSource::parse("0(01)");
  std::vector<int> bits;
  for (int i = 0; i < 7; ++i) bits.push_back(a.next());
  CHECK(bits == std::vector<int>{0, 0, 1, 0, 1, 0, 1});
  CHECK(a.consumed() == 7);
  auto b = OmegaSource::parse("10");
  CHECK(b.next() == 1);
  CHECK(b.next() == 0);
  CHECK_THROWS_AS(b.next(), OmegaExhausted);
  CHECK_THROWS(OmegaSource::parse("0()"));
  CHECK_THROWS(OmegaSource::parse("02"));
  auto r1 = OmegaSource::bernoulli(0.3, 99);
  auto r2 = OmegaSource::bernoulli(0.3, 99);
  for (int i = 0; i < 100; ++i) CHECK(r1.next() == r2.next());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("6/14") == q(3, 7));
  CHECK(parse_rational("0.25") == q(1, 4));
  CHECK(parse_rational("1") == 1);
  CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
  CHECK_THROWS_AS(parse_rational("abc"), DomainError);
  CHECK(to_fraction_string(q(2, 4)) == "1/2");
  CHECK(nearest_rational(0.333333, 1000000) == q(333333, 1000000));
  CHECK(nearest_rational(1.0 / 3.0, 1000000) == q(1, 3));
  CHECK_THROWS_AS(validate_cut(q(3, 5)), DomainError);
  CHECK_THROWS_AS(validate(Params{q(1, 3), q(0)}, true), DomainError);
}
