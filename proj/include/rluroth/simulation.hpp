#pragma once

#include "rluroth/core.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace rluroth {

struct SimConfig {
  BigRational c{0};
  double p = 0.5;                      ///< probability of omega bit 0
  std::size_t n_steps = 1000;          ///< recorded steps per trajectory
  std::size_t n_trajectories = 1;
  std::uint64_t seed = 0;
  std::optional<double> x0;            ///< uniform on [c, 1] when empty
  std::optional<std::size_t> burn_in;  ///< default: 1000 for c > 0, none for c = 0
  unsigned threads = 1;                ///< 0 picks the hardware concurrency
};

void validate(const SimConfig& config);
std::size_t effective_burn_in(const SimConfig& config);

struct StatReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::optional<double> reference;
  std::uint64_t seed = 0;
};

struct StepRecord {
  int bit = 0;
  SignDigit symbol;
  Branch branch = Branch::Luroth;
  Zone zone = Zone::Switch;
  double x_prev = 0.0;
  double x_next = 0.0;
};

/// One sample path of L_{c,p}. A uniform start point is sampled lazily: the
/// state is an interval [lo, lo + w] that the true point is uniform in. Before
/// each step the interval is split by fresh random bits until one branch
/// applies to all of it, and topped up with 24 more bits when it grows past
/// 2^-20. A fixed start uses w = 0, which is the plain binary64 orbit.
class Trajectory {
 public:
  Trajectory(const CutGeometry& geo, double p, std::uint64_t stream_seed,
             std::optional<double> x0);

  StepRecord advance();
  /// Digit and zone of the current point (refining as needed).
  Location where();
  double point() const { return lo_; }
  std::mt19937_64& generator() { return gen_; }

 private:
  void settle();

  const CutGeometry* geo_;
  double p_;
  std::mt19937_64 gen_;
  double lo_;
  double w_;
};

/// Birkhoff average of log(d(d-1)).
StatReport lyapunov_mc(const SimConfig& config);

struct ThetaStats {
  StatReport mean;
  std::vector<double> grid;
  std::vector<double> empirical_cdf;
  std::vector<double> reference_cdf;         ///< p F_L + (1-p) F_A (c = 0 only)
  std::optional<double> grid_sup_distance;   ///< over the grid (c = 0 only)
  std::optional<double> ks_distance;         ///< exact sup over all samples (c = 0 only)
  std::size_t out_of_range = 0;              ///< samples outside [0, 1]
};

ThetaStats theta_stats_mc(const SimConfig& config, const std::vector<double>& grid);

struct FrequencyTable {
  std::size_t n_samples = 0;
  std::map<std::int64_t, StatReport> digit;
  std::map<SignDigit, StatReport> signed_digit;
};

/// Empirical pi_d and pi_(s,d). For c = 0 digits up to digit_cutoff are reported.
FrequencyTable digit_freq_mc(const SimConfig& config, std::int64_t digit_cutoff = 10);

/// Per-trajectory (1/n) log|x - p_n/q_n|, against -Lambda.
StatReport convergence_rate_mc(const SimConfig& config);

struct CoverageReport {
  std::size_t block_len = 1;
  std::vector<SignDigit> alphabet;
  std::size_t possible = 0;
  std::size_t observed = 0;
  std::size_t windows = 0;
  std::vector<std::vector<SignDigit>> missing;  ///< first 100 unseen blocks
  std::map<SignDigit, StatReport> singles;      ///< length-1 frequencies
};

/// Counts sign-digit blocks; the alphabet is {0,1} x {2..ceil(1/c)}, or
/// {0,1} x {2..digit_cutoff} when c = 0.
CoverageReport block_coverage(const SimConfig& config, std::size_t block_len,
                              std::int64_t digit_cutoff = 3);

struct HittingReport {
  std::map<std::size_t, std::size_t> histogram;  ///< first S-hit index -> count
  std::size_t failures = 0;
  std::size_t trajectories = 0;
  std::size_t max_observed = 0;
  std::uint64_t seed = 0;
};

HittingReport switch_hitting_mc(const SimConfig& config, std::size_t max_steps);

struct TrajectorySummary {
  std::size_t index = 0;
  double x_final = 0.0;
  double lyapunov = 0.0;
  double theta_mean = 0.0;
};

struct TraceRow {
  std::size_t trajectory = 0;
  std::size_t step = 0;
  StepRecord record;
  double theta = 0.0;
};

struct SimulationResult {
  std::vector<TrajectorySummary> trajectories;
  std::vector<TraceRow> trace;  ///< at most max_trace_rows, trajectory-major
};

SimulationResult simulate(const SimConfig& config, std::size_t max_trace_rows = 0);

/// Reference Lyapunov exponent: the series for c = 0, the exact density
/// otherwise. Empty when no unique stationary density exists (p in {0, 1}).
std::optional<double> lyapunov_reference(const BigRational& c, double p);

}  // namespace rluroth
