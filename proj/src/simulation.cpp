#include "rluroth/simulation.hpp"

#include "rluroth/markov.hpp"
#include "rluroth/omega.hpp"
#include "rluroth/stats.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace rluroth {

void validate(const SimConfig& config) {
  validate_cut(config.c);
  if (!(config.p >= 0.0 && config.p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  if (config.n_steps < 1) throw DomainError("steps must be >= 1");
  if (config.n_trajectories < 1) throw DomainError("trajectories must be >= 1");
  if (config.x0) {
    const CutGeometry geo(config.c);
    if (*config.x0 == 0.0) throw DomainError("x0 = 0 has no expansion");
    require_domain(geo, *config.x0, "x0");
  }
}

std::size_t effective_burn_in(const SimConfig& config) {
  if (config.burn_in) return *config.burn_in;
  return config.c == 0 ? 0 : 1000;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kRefillAbove = 0x1p-20;
constexpr int kRefillBits = 24;
constexpr double kTooSmall = 0x1p-52;

}  // namespace

Trajectory::Trajectory(const CutGeometry& geo, double p, std::uint64_t stream_seed,
                       std::optional<double> x0)
    : geo_(&geo), p_(p), gen_(stream_seed) {
  if (x0) {
    require_domain(geo, *x0, "trajectory start");
    lo_ = *x0;
    w_ = 0.0;
  } else {
    lo_ = geo.c_approx();
    w_ = 1.0 - lo_;
  }
}

void Trajectory::settle() {
  while (w_ > kRefillAbove) {
    const double u = static_cast<double>(gen_() >> (64 - kRefillBits));
    w_ *= 0x1p-24;
    lo_ += w_ * u;
  }
  while (w_ > 0.0) {
    const double hi = lo_ + w_;
    if (hi == lo_) {
      w_ = 0.0;
      break;
    }
    if (lo_ >= kTooSmall && geo_->locate(lo_) == geo_->locate(hi)) break;
    w_ *= 0.5;
    if (gen_() >> 63) lo_ += w_;
  }
  if (lo_ <= 0.0) throw DomainError("trajectory reached 0");
}

Location Trajectory::where() {
  settle();
  return geo_->locate(lo_);
}

StepRecord Trajectory::advance() {
  const Location loc = where();
  StepRecord rec;
  rec.bit = bernoulli_bit(gen_, p_);
  rec.branch = branch_for(loc.zone, rec.bit);
  rec.zone = loc.zone;
  rec.symbol = SignDigit{rec.branch == Branch::Alternating ? 1 : 0, loc.digit};
  rec.x_prev = lo_;

  const double dn = static_cast<double>(loc.digit);
  const double slope = dn * (dn - 1.0);
  double lo = rec.branch == Branch::Luroth ? std::fma(slope, lo_, -(dn - 1.0))
                                           : std::fma(-slope, lo_ + w_, dn);
  double w = w_ * slope;
  const double floor_c = geo_->c_approx();
  if (w > 1.0 - floor_c) w = 1.0 - floor_c;
  lo = std::max(lo, floor_c);
  if (lo + w > 1.0) lo = 1.0 - w;
  lo_ = lo;
  w_ = w;
  rec.x_next = lo_;
  return rec;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kBatches = 32;

/// Per-trajectory sums of an observable, split into kBatches consecutive
/// batches so a single long trajectory still yields a standard error.
struct Batched {
  std::array<double, kBatches> sum{};
  std::array<std::size_t, kBatches> count{};

  void add(std::size_t t, std::size_t n, double v) {
    const std::size_t b = t * kBatches / n;
    sum[b] += v;
    ++count[b];
  }
};

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  long double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<long double>(xs.size());
  long double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(xs.size() - 1)));
}

/// Reduction in trajectory-index order: standard error across trajectories,
/// or across batch means when there is only one.
StatReport reduce(const std::vector<const Batched*>& parts, std::uint64_t seed) {
  StatReport r;
  r.seed = seed;
  long double total = 0;
  std::size_t n = 0;
  std::vector<double> means;
  for (const Batched* b : parts) {
    long double s = 0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < kBatches; ++i) {
      s += b->sum[i];
      k += b->count[i];
    }
    total += s;
    n += k;
    if (k > 0) means.push_back(static_cast<double>(s / static_cast<long double>(k)));
  }
  r.n_samples = n;
  r.estimate = n > 0 ? static_cast<double>(total / static_cast<long double>(n)) : 0.0;
  if (parts.size() == 1) {
    means.clear();
    for (std::size_t i = 0; i < kBatches; ++i)
      if (parts[0]->count[i] > 0)
        means.push_back(parts[0]->sum[i] / static_cast<double>(parts[0]->count[i]));
  }
  if (means.size() >= 2) r.std_error = sample_sd(means) / std::sqrt(static_cast<double>(means.size()));
  return r;
}

template <class T>
StatReport reduce_field(const std::vector<T>& per, Batched T::*field, std::uint64_t seed) {
  std::vector<const Batched*> parts;
  parts.reserve(per.size());
  for (const auto& t : per) parts.push_back(&(t.*field));
  return reduce(parts, seed);
}

/// Runs fn(index) for every trajectory on a small thread pool; results land
/// in index order, so the reduction never depends on the thread count.
template <class Out, class Fn>
std::vector<Out> for_each_trajectory(const SimConfig& config, Fn&& fn) {
  const std::size_t n = config.n_trajectories;
  std::vector<Out> out(n);
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Trajectory make_trajectory(const CutGeometry& geo, const SimConfig& config, std::size_t index) {
  return Trajectory(geo, config.p, derive_seed(config.seed, index), config.x0);
}

void burn(Trajectory& traj, std::size_t steps) {
  for (std::size_t i = 0; i < steps; ++i) traj.advance();
}

double log_weight(std::int64_t d) {
  const double dd = static_cast<double>(d);
  return std::log(dd * (dd - 1.0));
}

/// Symbol alphabet {0,1} x {2..top} indexed as 2 (d - 2) + s.
struct Alphabet {
  std::int64_t top = 2;

  std::size_t size() const { return static_cast<std::size_t>(2 * (top - 1)); }
  std::int64_t index(const SignDigit& sd) const {
    return sd.d > top ? -1 : 2 * (sd.d - 2) + sd.s;
  }
  SignDigit symbol(std::size_t i) const {
    return SignDigit{static_cast<int>(i % 2), static_cast<std::int64_t>(i / 2) + 2};
  }
};

Alphabet alphabet_for(const CutGeometry& geo, std::int64_t digit_cutoff) {
  if (!geo.unbounded()) return Alphabet{geo.max_digit()};
  if (digit_cutoff < 2) throw DomainError("digit cutoff must be >= 2");
  return Alphabet{digit_cutoff};
}

/// Closed-form pi_(s,d) for c = 0, from the exact density otherwise.
std::map<SignDigit, double> symbol_references(const BigRational& c, double p,
                                              const Alphabet& alpha) {
  std::map<SignDigit, double> ref;
  if (c == 0) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const SignDigit sd = alpha.symbol(i);
      const double w = static_cast<double>(sd.d) * static_cast<double>(sd.d - 1);
      ref[sd] = (sd.s == 0 ? p : 1.0 - p) / w;
    }
    return ref;
  }
  if (!(p > 0.0 && p < 1.0)) return ref;
  const auto density = stationary_density_real(c, p);
  const auto freq = digit_frequencies(density, p);
  for (const auto& [sd, v] : freq.signed_digit) ref[sd] = v;
  return ref;
}

struct SymbolCounts {
  std::vector<std::array<double, kBatches>> sums;
  std::array<std::size_t, kBatches> count{};

  explicit SymbolCounts(std::size_t k = 0) : sums(k) {}
  void add(std::size_t t, std::size_t n, std::int64_t idx) {
    const std::size_t b = t * kBatches / n;
    ++count[b];
    if (idx >= 0) sums[static_cast<std::size_t>(idx)][b] += 1.0;
  }
  Batched field(std::size_t idx) const {
    Batched out;
    out.sum = sums[idx];
    out.count = count;
    return out;
  }
};

std::map<SignDigit, StatReport> reduce_symbols(const std::vector<SymbolCounts>& per,
                                               const Alphabet& alpha, std::uint64_t seed) {
  std::map<SignDigit, StatReport> out;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    std::vector<Batched> fields;
    fields.reserve(per.size());
    for (const auto& t : per) fields.push_back(t.field(k));
    std::vector<const Batched*> parts;
    for (const auto& f : fields) parts.push_back(&f);
    out[alpha.symbol(k)] = reduce(parts, seed);
  }
  return out;
}

}  // namespace

std::optional<double> lyapunov_reference(const BigRational& c, double p) {
  if (c == 0) return luroth_series_lyapunov(1000000).midpoint();
  if (!(p > 0.0 && p < 1.0)) return std::nullopt;
  return lyapunov_exact(stationary_density_real(c, p));
}

StatReport lyapunov_mc(const SimConfig& config) {
  validate(config);
  const CutGeometry geo(config.c);
  const std::size_t burn_in = effective_burn_in(config);
  struct Out {
    Batched log_slope;
  };
  auto per = for_each_trajectory<Out>(config, [&](std::size_t i) {
    Trajectory traj = make_trajectory(geo, config, i);
    burn(traj, burn_in);
    Out o;
    for (std::size_t t = 0; t < config.n_steps; ++t)
      o.log_slope.add(t, config.n_steps, log_weight(traj.advance().symbol.d));
    return o;
  });
  StatReport r = reduce_field(per, &Out::log_slope, config.seed);
  r.reference = lyapunov_reference(config.c, config.p);
  return r;
}

ThetaStats theta_stats_mc(const SimConfig& config, const std::vector<double>& grid) {
  validate(config);
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("theta grid must be sorted");
  const CutGeometry geo(config.c);
  const std::size_t burn_in = effective_burn_in(config);
  const bool keep = config.n_steps * config.n_trajectories <= 20'000'000;
  struct Out {
    Batched theta;
    std::vector<std::size_t> bins;
    std::vector<double> samples;
    std::size_t out_of_range = 0;
  };
  auto per = for_each_trajectory<Out>(config, [&](std::size_t i) {
    Trajectory traj = make_trajectory(geo, config, i);
    burn(traj, burn_in);
    Out o;
    o.bins.assign(grid.size() + 1, 0);
    if (keep) o.samples.reserve(config.n_steps);
    for (std::size_t t = 0; t < config.n_steps; ++t) {
      const StepRecord rec = traj.advance();
      const double th = theta(rec.branch, rec.symbol.d, rec.x_prev);
      o.theta.add(t, config.n_steps, th);
      if (th < -1e-12 || th > 1.0 + 1e-12) ++o.out_of_range;
      // bins[k] counts samples with grid[k-1] < th <= grid[k].
      const auto k = std::lower_bound(grid.begin(), grid.end(), th) - grid.begin();
      ++o.bins[static_cast<std::size_t>(k)];
      if (keep) o.samples.push_back(th);
    }
    return o;
  });

  ThetaStats out;
  out.mean = reduce_field(per, &Out::theta, config.seed);
  out.grid = grid;
  std::vector<std::size_t> bins(grid.size() + 1, 0);
  for (const auto& o : per) {
    for (std::size_t k = 0; k < bins.size(); ++k) bins[k] += o.bins[k];
    out.out_of_range += o.out_of_range;
  }
  const double total = static_cast<double>(out.mean.n_samples);
  std::size_t running = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    running += bins[k];
    out.empirical_cdf.push_back(static_cast<double>(running) / total);
  }
  if (config.c == 0) {
    out.mean.reference = m_p(config.p);
    auto cdf = [&](double z) {
      if (z <= 0.0) return 0.0;
      if (z >= 1.0) return 1.0;
      return f_theta(z, config.p);
    };
    double sup = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out.reference_cdf.push_back(cdf(grid[k]));
      sup = std::max(sup, std::abs(out.empirical_cdf[k] - out.reference_cdf[k]));
    }
    if (!grid.empty()) out.grid_sup_distance = sup;
    if (keep) {
      std::vector<double> all;
      all.reserve(out.mean.n_samples);
      for (const auto& o : per) all.insert(all.end(), o.samples.begin(), o.samples.end());
      std::sort(all.begin(), all.end());
      double ks = 0.0;
      const double n = static_cast<double>(all.size());
      for (std::size_t i = 0; i < all.size(); ++i) {
        const double f = cdf(all[i]);
        ks = std::max({ks, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
      }
      out.ks_distance = ks;
    }
  }
  return out;
}

FrequencyTable digit_freq_mc(const SimConfig& config, std::int64_t digit_cutoff) {
  validate(config);
  const CutGeometry geo(config.c);
  const Alphabet alpha = alphabet_for(geo, digit_cutoff);
  const std::size_t burn_in = effective_burn_in(config);
  auto per = for_each_trajectory<SymbolCounts>(config, [&](std::size_t i) {
    Trajectory traj = make_trajectory(geo, config, i);
    burn(traj, burn_in);
    SymbolCounts o(alpha.size());
    for (std::size_t t = 0; t < config.n_steps; ++t)
      o.add(t, config.n_steps, alpha.index(traj.advance().symbol));
    return o;
  });

  FrequencyTable out;
  out.signed_digit = reduce_symbols(per, alpha, config.seed);
  out.n_samples = config.n_steps * config.n_trajectories;
  const auto refs = symbol_references(config.c, config.p, alpha);
  for (auto& [sd, rep] : out.signed_digit)
    if (auto it = refs.find(sd); it != refs.end()) rep.reference = it->second;

  // Digit frequencies: both signs merged.
  for (std::int64_t d = 2; d <= alpha.top; ++d) {
    std::vector<Batched> fields;
    for (const auto& t : per) {
      Batched b = t.field(static_cast<std::size_t>(alpha.index({0, d})));
      const Batched b1 = t.field(static_cast<std::size_t>(alpha.index({1, d})));
      for (std::size_t k = 0; k < kBatches; ++k) b.sum[k] += b1.sum[k];
      fields.push_back(b);
    }
    std::vector<const Batched*> parts;
    for (const auto& f : fields) parts.push_back(&f);
    StatReport rep = reduce(parts, config.seed);
    auto r0 = refs.find(SignDigit{0, d});
    auto r1 = refs.find(SignDigit{1, d});
    if (r0 != refs.end() && r1 != refs.end()) rep.reference = r0->second + r1->second;
    out.digit[d] = rep;
  }
  return out;
}

StatReport convergence_rate_mc(const SimConfig& config) {
  validate(config);
  const CutGeometry geo(config.c);
  struct Out {
    Batched neg_log_weight;
    double slope = 0.0;
  };
  auto per = for_each_trajectory<Out>(config, [&](std::size_t i) {
    Trajectory traj = make_trajectory(geo, config, i);
    Out o;
    // |x - p_n/q_n| = T^n(x) / prod d_i(d_i - 1), accumulated in log space.
    long double log_error = 0;
    double x = traj.point();
    for (std::size_t t = 0; t < config.n_steps; ++t) {
      const StepRecord rec = traj.advance();
      const double lw = log_weight(rec.symbol.d);
      log_error -= lw;
      o.neg_log_weight.add(t, config.n_steps, -lw);
      x = rec.x_next;
    }
    log_error += std::log(x);
    o.slope = static_cast<double>(log_error / static_cast<long double>(config.n_steps));
    return o;
  });
  StatReport r;
  if (per.size() == 1) {
    r = reduce_field(per, &Out::neg_log_weight, config.seed);
    r.estimate = per.front().slope;
    r.n_samples = 1;
  } else {
    std::vector<double> slopes;
    long double sum = 0;
    for (const auto& o : per) {
      slopes.push_back(o.slope);
      sum += o.slope;
    }
    r.seed = config.seed;
    r.n_samples = per.size();
    r.estimate = static_cast<double>(sum / static_cast<long double>(per.size()));
    r.std_error = sample_sd(slopes) / std::sqrt(static_cast<double>(per.size()));
  }
  if (auto ref = lyapunov_reference(config.c, config.p)) r.reference = -*ref;
  return r;
}

CoverageReport block_coverage(const SimConfig& config, std::size_t block_len,
                              std::int64_t digit_cutoff) {
  validate(config);
  if (block_len < 1) throw DomainError("block length must be >= 1");
  const CutGeometry geo(config.c);
  const Alphabet alpha = alphabet_for(geo, digit_cutoff);
  const std::size_t k = alpha.size();
  std::size_t possible = 1;
  for (std::size_t i = 0; i < block_len; ++i) {
    possible *= k;
    if (possible > (std::size_t{1} << 26)) throw DomainError("too many blocks to count");
  }
  const std::size_t burn_in = effective_burn_in(config);
  struct Out {
    SymbolCounts singles;
    std::vector<std::uint64_t> blocks;
    std::size_t windows = 0;
  };
  auto per = for_each_trajectory<Out>(config, [&](std::size_t i) {
    Trajectory traj = make_trajectory(geo, config, i);
    burn(traj, burn_in);
    Out o;
    o.singles = SymbolCounts(k);
    o.blocks.assign(possible, 0);
    std::size_t code = 0, valid = 0;
    for (std::size_t t = 0; t < config.n_steps; ++t) {
      const std::int64_t idx = alpha.index(traj.advance().symbol);
      o.singles.add(t, config.n_steps, idx);
      if (idx < 0) {
        valid = 0;
        code = 0;
        continue;
      }
      code = (code * k + static_cast<std::size_t>(idx)) % possible;
      if (++valid >= block_len) {
        ++o.blocks[code];
        ++o.windows;
      }
    }
    return o;
  });

  CoverageReport out;
  out.block_len = block_len;
  for (std::size_t i = 0; i < k; ++i) out.alphabet.push_back(alpha.symbol(i));
  out.possible = possible;
  std::vector<std::uint64_t> blocks(possible, 0);
  std::vector<SymbolCounts> singles;
  for (const auto& o : per) {
    for (std::size_t b = 0; b < possible; ++b) blocks[b] += o.blocks[b];
    out.windows += o.windows;
    singles.push_back(o.singles);
  }
  for (std::size_t b = 0; b < possible; ++b) {
    if (blocks[b] > 0) {
      ++out.observed;
      continue;
    }
    if (out.missing.size() >= 100) continue;
    std::vector<SignDigit> word(block_len);
    std::size_t code = b;
    for (std::size_t j = block_len; j-- > 0;) {
      word[j] = alpha.symbol(code % k);
      code /= k;
    }
    out.missing.push_back(std::move(word));
  }
  out.singles = reduce_symbols(singles, alpha, config.seed);
  const auto refs = symbol_references(config.c, config.p, alpha);
  for (auto& [sd, rep] : out.singles)
    if (auto it = refs.find(sd); it != refs.end()) rep.reference = it->second;
  return out;
}

HittingReport switch_hitting_mc(const SimConfig& config, std::size_t max_steps) {
  validate(config);
  if (config.c == 0 || config.c > make_rational(2, 5))
    throw DomainError("switch hitting requires 0 < c <= 2/5");
  const CutGeometry geo(config.c);
  auto per = for_each_trajectory<std::optional<std::size_t>>(config, [&](std::size_t i) {
    Trajectory traj = make_trajectory(geo, config, i);
    for (std::size_t n = 0;; ++n) {
      if (traj.where().zone == Zone::Switch) return std::optional<std::size_t>(n);
      if (n == max_steps) return std::optional<std::size_t>();
      traj.advance();
    }
  });
  HittingReport out;
  out.seed = config.seed;
  out.trajectories = per.size();
  for (const auto& hit : per) {
    if (!hit) {
      ++out.failures;
      continue;
    }
    ++out.histogram[*hit];
    out.max_observed = std::max(out.max_observed, *hit);
  }
  return out;
}

SimulationResult simulate(const SimConfig& config, std::size_t max_trace_rows) {
  validate(config);
  const CutGeometry geo(config.c);
  const std::size_t burn_in = effective_burn_in(config);
  struct Out {
    TrajectorySummary summary;
    std::vector<TraceRow> trace;
  };
  // Trace rows go to the first trajectories in order.
  const std::size_t per_traj_rows = config.n_steps;
  auto per = for_each_trajectory<Out>(config, [&](std::size_t i) {
    Trajectory traj = make_trajectory(geo, config, i);
    burn(traj, burn_in);
    Out o;
    o.summary.index = i;
    const bool record = i * per_traj_rows < max_trace_rows;
    long double lyap = 0, th = 0;
    for (std::size_t t = 0; t < config.n_steps; ++t) {
      const StepRecord rec = traj.advance();
      const double theta_n = theta(rec.branch, rec.symbol.d, rec.x_prev);
      lyap += log_weight(rec.symbol.d);
      th += theta_n;
      if (record && i * per_traj_rows + t < max_trace_rows)
        o.trace.push_back(TraceRow{i, t + 1, rec, theta_n});
    }
    const auto n = static_cast<long double>(config.n_steps);
    o.summary.x_final = traj.point();
    o.summary.lyapunov = static_cast<double>(lyap / n);
    o.summary.theta_mean = static_cast<double>(th / n);
    return o;
  });
  SimulationResult out;
  for (auto& o : per) {
    out.trajectories.push_back(o.summary);
    out.trace.insert(out.trace.end(), o.trace.begin(), o.trace.end());
  }
  return out;
}

}  // namespace rluroth
