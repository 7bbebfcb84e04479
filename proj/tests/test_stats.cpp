#include "rluroth/markov.hpp"
#include "rluroth/simulation.hpp"
#include "rluroth/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace rluroth;
using Q = BigRational;

namespace {

Q q(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

double direct_f_luroth(double z) {
  const auto m = static_cast<std::int64_t>(std::floor(1.0 / z));
  long double s = 0;
  for (std::int64_t k = 2; k <= m + 1; ++k) s += static_cast<long double>(z) / k;
  return static_cast<double>(s + 1.0L / static_cast<long double>(m + 1));
}

double direct_f_alternating(double z) {
  const auto m = static_cast<std::int64_t>(std::floor(1.0 / z));
  long double s = 0;
  for (std::int64_t k = 2; k <= m; ++k) s += static_cast<long double>(z) / (k - 1);
  return static_cast<double>(s + 1.0L / static_cast<long double>(m));
}

SimConfig config(const Q& c, double p, std::size_t steps, std::size_t trajectories, std::uint64_t seed) {
  SimConfig cfg;
  cfg.c = c;
  cfg.p = p;
  cfg.n_steps = steps;
  cfg.n_trajectories = trajectories;
  cfg.seed = seed;
  return cfg;
}

bool within(const StatReport& r, double want, double sigmas) {
  return std::abs(r.estimate - want) <= sigmas * r.std_error;
}

}  // namespace

TEST_CASE("theta distribution functions") {
  CHECK(f_luroth(1.0) == doctest::Approx(1.0));
  CHECK(f_luroth(0.5) == doctest::Approx(0.75));
  CHECK(f_alternating(0.5) == doctest::Approx(1.0));
  for (double p : {0.0, 0.3, 1.0}) CHECK(f_theta(0.5, p) == doctest::Approx(1 - p / 4));
  CHECK_THROWS_AS(f_luroth(0.0), DomainError);
  CHECK_THROWS_AS(f_alternating(1.5), DomainError);
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(1e-5, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double z = u(gen);
    CHECK(f_luroth(z) == doctest::Approx(direct_f_luroth(z)).epsilon(1e-12));
    CHECK(f_alternating(z) == doctest::Approx(direct_f_alternating(z)).epsilon(1e-12));
  }
}

TEST_CASE("harmonic numbers") {
  long double h = 0;
  for (std::int64_t m = 1; m <= 200000; ++m) {
    h += 1.0L / m;
    if (m < 300 || m % 997 == 0) CHECK(harmonic(m) == doctest::Approx(static_cast<double>(h)).epsilon(1e-14));
  }
  CHECK(harmonic(0) == 0.0);
}

TEST_CASE("first moments") {
  CHECK(m_luroth() == doctest::Approx(0.322467033424).epsilon(1e-11));
  CHECK(m_alternating() == doctest::Approx(0.177532966576).epsilon(1e-11));
  CHECK(m_p(1.0) == doctest::Approx(m_luroth()).epsilon(1e-15));
  CHECK(m_p(0.0) == doctest::Approx(m_alternating()).epsilon(1e-15));
  CHECK(m_p(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m_p(0.8) == doctest::Approx(0.293480220054).epsilon(1e-11));
  for (double p : {0.1, 0.37, 0.9}) CHECK(m_p(p) == doctest::Approx(p * m_luroth() + (1 - p) * m_alternating()));
  CHECK(std::abs(integrate_one_minus(f_luroth) - m_luroth()) < 1e-10);
  CHECK(std::abs(integrate_one_minus(f_alternating) - m_alternating()) < 1e-10);
}

TEST_CASE("Luroth series enclosure") {
  const auto two = luroth_series_lyapunov(2);
  CHECK(two.partial == doctest::Approx(std::log(2.0) / 2));
  CHECK(two.upper - two.partial > 1.0);
  const auto big = luroth_series_lyapunov(1000000);
  CHECK(big.width() < 1e-4);
  CHECK(big.lower <= big.upper);
  const auto mid = luroth_series_lyapunov(100000);
  CHECK(mid.lower <= big.upper);
  CHECK(big.lower <= mid.upper);
  // Direct summation further out, with a crude tail bound on top.
  long double s = 0;
  const std::int64_t far = 10000000;
  for (std::int64_t d = far; d >= 2; --d) {
    const long double w = static_cast<long double>(d) * (d - 1);
    s += std::log(w) / w;
  }
  const double tail = 3.0 * (std::log(static_cast<double>(far)) + 1.0) / static_cast<double>(far);
  CHECK(static_cast<double>(s) <= big.upper);
  CHECK(static_cast<double>(s) + tail >= big.lower);
  CHECK(big.midpoint() == doctest::Approx(2.0462774528).epsilon(1e-10));
  CHECK_THROWS_AS(luroth_series_lyapunov(1), DomainError);
}

TEST_CASE("simulation is reproducible across thread counts") {
  auto a = config(q(1, 3), 0.4, 20000, 8, 7);
  auto b = a;
  a.threads = 1;
  b.threads = 4;
  const auto ra = lyapunov_mc(a), rb = lyapunov_mc(b);
  CHECK(ra.estimate == rb.estimate);
  CHECK(ra.std_error == rb.std_error);
  const auto fa = digit_freq_mc(a), fb = digit_freq_mc(b);
  for (const auto& [sd, r] : fa.signed_digit) CHECK(fb.signed_digit.at(sd).estimate == r.estimate);
  const auto sa = simulate(a, 50), sb = simulate(b, 50);
  REQUIRE(sa.trace.size() == sb.trace.size());
  for (std::size_t i = 0; i < sa.trace.size(); ++i) CHECK(sa.trace[i].record.x_next == sb.trace[i].record.x_next);
  CHECK(ra.seed == 7);
  auto c = a;
  c.seed = 8;
  CHECK(lyapunov_mc(c).estimate != ra.estimate);
}

TEST_CASE("fixed point 1") {
  for (const Q& c : {q(0), q(1, 3)}) {
    auto cfg = config(c, 0.5, 1000, 1, 1);
    cfg.x0 = 1.0;
    CHECK(lyapunov_mc(cfg).estimate == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(convergence_rate_mc(cfg).estimate == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    const auto th = theta_stats_mc(cfg, {0.5, 1.0});
    CHECK(th.mean.estimate == 1.0);
  }
}

TEST_CASE("Lyapunov exponent by simulation") {
  const auto r = lyapunov_mc(config(q(1, 3), 0.4, 100000, 10, 3));
  REQUIRE(r.reference);
  CHECK(*r.reference == doctest::Approx(0.899136984685).epsilon(1e-11));
  CHECK(within(r, *r.reference, 3));
  const auto z = lyapunov_mc(config(q(0), 0.5, 1000000, 1, 4));
  REQUIRE(z.reference);
  CHECK(within(z, *z.reference, 3));
  CHECK(std::abs(z.estimate - 1.98329) > 5 * z.std_error);
}

TEST_CASE("convergence rate") {
  const auto r = convergence_rate_mc(config(q(0), 0.5, 10000, 100, 5));
  CHECK(r.n_samples == 100);
  CHECK(within(r, -luroth_series_lyapunov(1000000).midpoint(), 3));
  const auto s = convergence_rate_mc(config(q(1, 3), 0.4, 10000, 100, 6));
  CHECK(within(s, -0.899136984685, 3));
}

TEST_CASE("theta statistics") {
  std::vector<double> grid;
  for (int k = 1; k <= 50; ++k) grid.push_back(k / 50.0);
  for (double p : {0.2, 0.8}) {
    const auto st = theta_stats_mc(config(q(0), p, 1000000, 1, 9), grid);
    REQUIRE(st.mean.reference);
    CHECK(*st.mean.reference == doctest::Approx(m_p(p)));
    CHECK(within(st.mean, m_p(p), 3));
    CHECK(st.out_of_range == 0);
    REQUIRE(st.ks_distance);
    CHECK(*st.ks_distance <= 0.01);
    CHECK(*st.grid_sup_distance <= *st.ks_distance);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(st.reference_cdf[k] == doctest::Approx(f_theta(grid[k], p)));
  }
  const auto other = theta_stats_mc(config(q(1, 4), 0.5, 200000, 1, 10), grid);
  CHECK(other.out_of_range == 0);
  CHECK_FALSE(other.ks_distance);
}

TEST_CASE("orbit points are uniform for c = 0") {
  const CutGeometry geo(q(0));
  Trajectory traj(geo, 0.5, 77, std::nullopt);
  std::vector<double> xs;
  for (int i = 0; i < 400000; ++i) xs.push_back(traj.advance().x_next);
  std::sort(xs.begin(), xs.end());
  double ks = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    ks = std::max({ks, std::abs(xs[i] - i / n), std::abs((i + 1) / n - xs[i])});
  CHECK(ks < 0.005);
}

TEST_CASE("digit frequencies by simulation") {
  const auto z = digit_freq_mc(config(q(0), 0.3, 1000000, 1, 11), 5);
  CHECK(within(z.digit.at(2), 0.5, 3));
  CHECK(within(z.digit.at(3), 1.0 / 6, 3));
  CHECK(within(z.signed_digit.at({0, 2}), 0.15, 3));
  CHECK(z.digit.at(2).reference == doctest::Approx(0.5));
  const auto t = digit_freq_mc(config(q(1, 3), 0.5, 200000, 10, 12));
  CHECK(within(t.digit.at(2), 13.0 / 16, 3));
  CHECK(within(t.signed_digit.at({0, 2}), 0.46875, 3));
  CHECK(within(t.signed_digit.at({1, 3}), 1.5 / 16, 3));
  CHECK(t.signed_digit.at({0, 2}).reference == doctest::Approx(0.46875));
}

TEST_CASE("block coverage") {
  const auto a = block_coverage(config(q(1, 3), 0.5, 1000000, 1, 13), 1);
  CHECK(a.possible == 4);
  CHECK(a.observed == 4);
  CHECK(within(a.singles.at({0, 2}), 0.46875, 3));
  CHECK(within(a.singles.at({1, 2}), 5.5 / 16, 3));
  const double p = 0.3;
  const auto b = block_coverage(config(q(0), p, 1000000, 1, 14), 1, 3);
  CHECK(b.alphabet.size() == 4);
  CHECK(within(b.singles.at({0, 2}), p / 2, 3));
  CHECK(within(b.singles.at({1, 2}), (1 - p) / 2, 3));
  CHECK(within(b.singles.at({0, 3}), p / 6, 3));
  CHECK(within(b.singles.at({1, 3}), (1 - p) / 6, 3));
  const auto c = block_coverage(config(q(1, 4), 0.5, 2000000, 1, 15), 2);
  CHECK(c.possible == 36);
  CHECK(c.observed == 36);
  CHECK(c.missing.empty());
}

TEST_CASE("switch hitting") {
  auto in_s = config(q(1, 3), 0.5, 1, 50, 16);
  in_s.x0 = 5.0 / 7;
  const auto a = switch_hitting_mc(in_s, 100);
  CHECK(a.histogram == std::map<std::size_t, std::size_t>{{0, 50}});
  auto six = in_s;
  six.x0 = 6.0 / 7;
  const auto b = switch_hitting_mc(six, 100);
  CHECK(b.histogram == std::map<std::size_t, std::size_t>{{1, 50}});
  const auto c = switch_hitting_mc(config(q(2, 5), 0.5, 1, 10000, 17), 1000);
  CHECK(c.failures == 0);
  CHECK(c.trajectories == 10000);
  CHECK_THROWS_AS(switch_hitting_mc(config(q(1, 2), 0.5, 1, 10, 1), 10), DomainError);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(lyapunov_mc(config(q(1, 3), 1.5, 10, 1, 1)), DomainError);
  CHECK_THROWS_AS(lyapunov_mc(config(q(1, 3), 0.5, 0, 1, 1)), DomainError);
  auto bad = config(q(1, 3), 0.5, 10, 1, 1);
  bad.x0 = 0.2;
  CHECK_THROWS_AS(lyapunov_mc(bad), DomainError);
  CHECK(effective_burn_in(config(q(1, 3), 0.5, 10, 1, 1)) == 1000);
  CHECK(effective_burn_in(config(q(0), 0.5, 10, 1, 1)) == 0);
}

TEST_CASE("reference values") {
  CHECK(*lyapunov_reference(q(1, 4), 0.2) ==
        doctest::Approx((0.2 * std::log(64.0) + std::log(27648.0)) / (6 * 0.2 + 9)).epsilon(1e-12));
  CHECK(*lyapunov_reference(q(0), 0.5) == doctest::Approx(2.0462774528).epsilon(1e-10));
}
