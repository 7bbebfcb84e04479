#include "cli.hpp"

#include "rluroth/expansion.hpp"
#include "rluroth/io.hpp"
#include "rluroth/markov.hpp"
#include "rluroth/orbits.hpp"
#include "rluroth/simulation.hpp"
#include "rluroth/stats.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>

namespace rluroth::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::int64_t kMaxMappedDenominator = 1000000;

const char* kSchemas = R"(CSV schemas:
  expand       n,omega_bit,s,d,x_num,x_den,p_n,q_n,theta_n   (x instead of x_num,x_den with --real)
  markov       point,origin
  density      left,right,value
  freq         s,d,estimate,std_error,reference
  lyapunov     estimate,std_error,n_samples,reference,seed
  theta-stats  z,empirical_cdf,reference_cdf
  simulate     trajectory,x_final,lyapunov,theta_mean   (with --trace: trajectory,step,omega_bit,s,d,x_prev,x_next,theta)
  coverage     s,d,frequency,std_error,reference
  hitting      steps,count
Exit codes: 0 ok, 1 domain error, 2 usage error, 3 closure cap exceeded.)";

struct Options {
  std::string c = "0";
  std::string p = "1/2";
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out_path;
  unsigned threads = 1;

  // point and omega
  std::string x;
  std::string omega;
  std::size_t steps = 10;
  bool real = false;

  // psi
  std::string digits;
  std::string period;
  std::string csv_path;

  // classify / markov
  std::string emit_graph;
  std::size_t node_cap = kDefaultNodeCap;
  std::size_t expansions = 0;
  std::size_t max_period = 8;
  std::size_t cap = kDefaultPointCap;

  // density
  std::string eval;
  bool unmerged = false;

  // statistics
  std::size_t trajectories = 1;
  std::string x0;
  std::optional<std::size_t> burn_in;
  bool exact = false;
  std::int64_t series = 0;
  std::size_t grid_points = 100;
  std::size_t trace = 0;
  std::size_t block_len = 3;
  std::int64_t cutoff = 3;
  std::size_t max_steps = 1000;
};

struct PValue {
  BigRational exact;
  double real = 0.5;
  bool mapped = false;
};

BigRational parse_cut(const std::string& text) {
  BigRational c = parse_rational(text);
  validate_cut(c);
  return c;
}

PValue parse_p(const std::string& text) {
  PValue out;
  out.exact = parse_rational(text);
  if (out.exact < 0 || out.exact > 1) throw DomainError("p must lie in [0, 1], got " + text);
  out.real = out.exact.get_d();
  if (out.exact.get_den() > kMaxMappedDenominator) {
    out.exact = nearest_rational(out.real, kMaxMappedDenominator);
    out.mapped = true;
  }
  return out;
}

void add_p(Json& j, const PValue& p) {
  j["p"] = to_json(p.exact);
  if (p.mapped) j["p_mapped_from_decimal"] = true;
}

std::vector<SignDigit> parse_digits(const std::string& text) {
  static const std::regex symbol(R"(\(\s*([01])\s*,\s*(\d+)\s*\))");
  std::vector<SignDigit> out;
  std::string rest;
  auto begin = std::sregex_iterator(text.begin(), text.end(), symbol);
  std::size_t consumed = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::string between = text.substr(consumed, static_cast<std::size_t>(it->position()) - consumed);
    if (between.find_first_not_of(" ,") != std::string::npos)
      throw UsageError("bad digit list near '" + between + "'");
    out.push_back(SignDigit{std::stoi((*it)[1]), std::stoll((*it)[2])});
    consumed = static_cast<std::size_t>(it->position() + it->length());
  }
  if (text.substr(consumed).find_first_not_of(" ,") != std::string::npos)
    throw UsageError("bad digit list: '" + text + "'");
  validate_digits(out);
  return out;
}

/// Destination for results: --out path or the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw DomainError("cannot open output file: " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

bool want_csv(const Options& o) {
  if (o.format != "csv" && o.format != "json") throw UsageError("--format must be csv or json");
  return o.format == "csv";
}

SimConfig sim_config(const Options& o) {
  SimConfig cfg;
  cfg.c = parse_cut(o.c);
  cfg.p = parse_p(o.p).real;
  cfg.n_steps = o.steps;
  cfg.n_trajectories = o.trajectories;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.burn_in = o.burn_in;
  if (!o.x0.empty()) cfg.x0 = parse_rational(o.x0).get_d();
  validate(cfg);
  return cfg;
}

Json config_json(const SimConfig& cfg) {
  Json j;
  j["c"] = to_json(cfg.c);
  j["p"] = cfg.p;
  j["steps"] = cfg.n_steps;
  j["trajectories"] = cfg.n_trajectories;
  j["seed"] = cfg.seed;
  j["burn_in"] = effective_burn_in(cfg);
  j["x0"] = cfg.x0 ? Json(*cfg.x0) : Json("uniform");
  return j;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// ---------------------------------------------------------------------------

int cmd_expand(const Options& o, std::ostream& out) {
  if (o.x.empty()) throw UsageError("expand requires --x");
  if (o.omega.empty()) throw UsageError("expand requires --omega (WORD, PRE(PERIOD) or random)");
  const BigRational c = parse_cut(o.c);
  const CutGeometry geo(c);
  OmegaSource omega = o.omega == "random" ? OmegaSource::bernoulli(parse_p(o.p).real, o.seed)
                                          : OmegaSource::parse(o.omega);
  const bool csv = want_csv(o);
  Sink sink(o.out_path, out);
  if (o.real) {
    const auto rec = expand(omega, parse_rational(o.x).get_d(), geo, o.steps);
    if (csv) {
      write_expansion_csv(*sink, rec);
    } else {
      Json j = expansion_json(rec);
      j["c"] = to_json(c);
      j["omega"] = omega.describe();
      *sink << dump_json(j) << "\n";
    }
  } else {
    const auto rec = expand(omega, parse_rational(o.x), geo, o.steps);
    if (csv) {
      write_expansion_csv(*sink, rec);
    } else {
      Json j = expansion_json(rec);
      j["c"] = to_json(c);
      j["omega"] = omega.describe();
      *sink << dump_json(j) << "\n";
    }
  }
  return kExitOk;
}

/// x from an exact expand CSV: x = p_n/q_n + (-1)^(s_1+...+s_n) T^n(x) / prod d_i(d_i-1).
BigRational reconstruct_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,omega_bit,s,d,x_num,x_den", 0) != 0)
    throw UsageError("psi --csv expects the exact CSV written by expand");
  std::vector<SignDigit> digits;
  BigRational last;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (cells.size() < 6) throw UsageError("short CSV row: " + line);
    digits.push_back(SignDigit{std::stoi(cells[2]), std::stoll(cells[3])});
    last = make_rational(BigInt(cells[4]), BigInt(cells[5]));
  }
  if (digits.empty()) throw UsageError("psi --csv: no rows");
  BigRational tail = last;
  BigInt prod = 1;
  int parity = 0;
  for (const auto& sd : digits) {
    prod *= digit_weight(sd.d);
    parity ^= sd.s;
  }
  tail /= BigRational(prod);
  return psi_prefix(digits) + (parity ? BigRational(-tail) : tail);
}

int cmd_psi(const Options& o, std::ostream& out) {
  Json j;
  BigRational value;
  if (!o.csv_path.empty()) {
    if (o.csv_path == "-") {
      value = reconstruct_from_csv(std::cin);
    } else {
      std::ifstream in(o.csv_path);
      if (!in) throw DomainError("cannot open " + o.csv_path);
      value = reconstruct_from_csv(in);
    }
    j["mode"] = "reconstruct";
  } else if (!o.period.empty()) {
    value = psi_periodic(parse_digits(o.digits), parse_digits(o.period));
    j["mode"] = "periodic";
  } else if (!o.digits.empty()) {
    const auto digits = parse_digits(o.digits);
    value = psi_prefix(digits);
    j["mode"] = "prefix";
    const Convergent conv = convergent(digits);
    j["p_n"] = conv.p.get_str();
    j["q_n"] = conv.q.get_str();
  } else {
    throw UsageError("psi requires --digits, --period or --csv");
  }
  j["value"] = to_json(value);
  j["approx"] = value.get_d();
  Sink sink(o.out_path, out);
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
  if (o.x.empty()) throw UsageError("classify requires --x");
  const BigRational c = parse_cut(o.c);
  const BigRational x = parse_rational(o.x);
  const Classification cls = classify(x, c, o.node_cap);
  Sink sink(o.out_path, out);
  if (!o.emit_graph.empty()) {
    if (o.emit_graph == "-") {
      write_dot(*sink, cls.graph);
      return kExitOk;
    }
    std::ofstream dot(o.emit_graph);
    if (!dot) throw DomainError("cannot open " + o.emit_graph);
    write_dot(dot, cls.graph);
  }
  Json j;
  j["x"] = to_json(x);
  j["c"] = to_json(c);
  j["class"] = to_string(cls.kind);
  j["nodes"] = cls.graph.size();
  Json witness;
  if (cls.kind == OrbitClass::UniquePeriodic) {
    Json path = Json::array();
    for (const auto& q : cls.deterministic.path) path.push_back(to_json(q));
    witness["deterministic_path"] = path;
    witness["cycle_start"] = cls.deterministic.cycle_start;
  } else {
    Json loops = Json::array();
    for (const auto& loop : cls.loops) loops.push_back(to_json(loop, cls.graph));
    witness["loops"] = loops;
  }
  j["witness"] = witness;
  if (o.expansions > 0) {
    Json list = Json::array();
    for (const auto& e : enumerate_expansions(x, c, o.expansions, o.max_period, o.node_cap))
      list.push_back(to_json(e));
    j["expansions"] = list;
  }
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_markov(const Options& o, std::ostream& out) {
  const BigRational c = parse_cut(o.c);
  const MarkovPartition part = markov_points(c, o.cap);
  Sink sink(o.out_path, out);
  if (want_csv(o)) {
    *sink << "point,origin\n";
    for (std::size_t i = 0; i < part.points.size(); ++i)
      *sink << to_fraction_string(part.points[i]) << ','
            << (part.origin[i] == PointOrigin::Critical ? "critical" : "orbit") << '\n';
    return kExitOk;
  }
  Json j;
  j["c"] = to_json(c);
  Json pts = Json::array(), origin = Json::array();
  for (std::size_t i = 0; i < part.points.size(); ++i) {
    pts.push_back(to_json(part.points[i]));
    origin.push_back(part.origin[i] == PointOrigin::Critical ? "critical" : "orbit");
  }
  j["points"] = pts;
  j["origin"] = origin;
  j["cells"] = part.cells();
  j["markov_verified"] = true;
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_density(const Options& o, std::ostream& out) {
  const BigRational c = parse_cut(o.c);
  const PValue p = parse_p(o.p);
  const auto full = stationary_density(markov_points(c, o.cap), p.exact);
  const auto density = o.unmerged ? full : full.merged();
  Sink sink(o.out_path, out);
  if (want_csv(o)) {
    *sink << "left,right,value\n";
    for (std::size_t i = 0; i < density.pieces(); ++i)
      *sink << to_fraction_string(density.breakpoints[i]) << ','
            << to_fraction_string(density.breakpoints[i + 1]) << ','
            << to_fraction_string(density.values[i]) << '\n';
    return kExitOk;
  }
  Json j = density_json(density, !o.unmerged);
  add_p(j, p);
  if (!o.eval.empty()) {
    const BigRational x = parse_rational(o.eval);
    j["eval"] = Json{{"x", to_json(x)}, {"value", to_json(density(x))}};
  }
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_freq(const Options& o, std::ostream& out) {
  Sink sink(o.out_path, out);
  const bool csv = want_csv(o);
  if (o.exact) {
    const BigRational c = parse_cut(o.c);
    const PValue p = parse_p(o.p);
    const auto density = stationary_density(markov_points(c, o.cap), p.exact);
    const auto freq = digit_frequencies(density, p.exact);
    if (csv) {
      *sink << "s,d,estimate,std_error,reference\n";
      for (const auto& [sd, v] : freq.signed_digit)
        *sink << sd.s << ',' << sd.d << ',' << to_fraction_string(v) << ",0,"
              << to_fraction_string(v) << '\n';
      return kExitOk;
    }
    Json j;
    j["c"] = to_json(c);
    add_p(j, p);
    Json digits = Json::object(), signed_digits = Json::array();
    for (const auto& [d, v] : freq.digit) digits[std::to_string(d)] = to_json(v);
    for (const auto& [sd, v] : freq.signed_digit)
      signed_digits.push_back(Json{{"s", sd.s}, {"d", sd.d}, {"value", to_json(v)}});
    j["digit"] = digits;
    j["signed_digit"] = signed_digits;
    *sink << dump_json(j) << "\n";
    return kExitOk;
  }
  const SimConfig cfg = sim_config(o);
  const FrequencyTable table = digit_freq_mc(cfg, o.cutoff);
  if (csv) {
    *sink << "s,d,estimate,std_error,reference\n";
    for (const auto& [sd, r] : table.signed_digit)
      *sink << sd.s << ',' << sd.d << ',' << format_double(r.estimate) << ','
            << format_double(r.std_error) << ',' << opt_double(r.reference) << '\n';
    return kExitOk;
  }
  Json j = config_json(cfg);
  Json digits = Json::object(), signed_digits = Json::array();
  for (const auto& [d, r] : table.digit) digits[std::to_string(d)] = to_json(r);
  for (const auto& [sd, r] : table.signed_digit) {
    Json row = to_json(r);
    row["s"] = sd.s;
    row["d"] = sd.d;
    signed_digits.push_back(row);
  }
  j["digit"] = digits;
  j["signed_digit"] = signed_digits;
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_lyapunov(const Options& o, std::ostream& out) {
  Sink sink(o.out_path, out);
  if (o.series > 0) {
    const SeriesEnclosure s = luroth_series_lyapunov(o.series);
    Json j{{"truncation", s.truncation}, {"partial", s.partial}, {"lower", s.lower},
           {"upper", s.upper}, {"width", s.width()}};
    *sink << dump_json(j) << "\n";
    return kExitOk;
  }
  if (o.exact) {
    const BigRational c = parse_cut(o.c);
    const PValue p = parse_p(o.p);
    Json j;
    j["c"] = to_json(c);
    add_p(j, p);
    j["lyapunov"] = lyapunov_exact(stationary_density(markov_points(c, o.cap), p.exact));
    *sink << dump_json(j) << "\n";
    return kExitOk;
  }
  const SimConfig cfg = sim_config(o);
  const StatReport r = lyapunov_mc(cfg);
  if (want_csv(o)) {
    *sink << "estimate,std_error,n_samples,reference,seed\n"
          << format_double(r.estimate) << ',' << format_double(r.std_error) << ','
          << r.n_samples << ',' << opt_double(r.reference) << ',' << r.seed << '\n';
    return kExitOk;
  }
  Json j = config_json(cfg);
  j["lyapunov"] = to_json(r);
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_theta(const Options& o, std::ostream& out) {
  const SimConfig cfg = sim_config(o);
  if (o.grid_points < 1) throw UsageError("--grid-points must be >= 1");
  std::vector<double> grid;
  for (std::size_t k = 1; k <= o.grid_points; ++k)
    grid.push_back(static_cast<double>(k) / static_cast<double>(o.grid_points));
  const ThetaStats st = theta_stats_mc(cfg, grid);
  Sink sink(o.out_path, out);
  if (want_csv(o)) {
    *sink << "z,empirical_cdf,reference_cdf\n";
    for (std::size_t k = 0; k < grid.size(); ++k)
      *sink << format_double(grid[k]) << ',' << format_double(st.empirical_cdf[k]) << ','
            << (st.reference_cdf.empty() ? "" : format_double(st.reference_cdf[k])) << '\n';
    return kExitOk;
  }
  Json j = config_json(cfg);
  j["mean"] = to_json(st.mean);
  j["grid_sup_distance"] = st.grid_sup_distance ? Json(*st.grid_sup_distance) : Json(nullptr);
  j["ks_distance"] = st.ks_distance ? Json(*st.ks_distance) : Json(nullptr);
  j["out_of_range"] = st.out_of_range;
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const SimConfig cfg = sim_config(o);
  const SimulationResult res = simulate(cfg, o.trace);
  Sink sink(o.out_path, out);
  if (want_csv(o)) {
    if (o.trace > 0) {
      *sink << "trajectory,step,omega_bit,s,d,x_prev,x_next,theta\n";
      for (const auto& row : res.trace)
        *sink << row.trajectory << ',' << row.step << ',' << row.record.bit << ','
              << row.record.symbol.s << ',' << row.record.symbol.d << ','
              << format_double(row.record.x_prev) << ',' << format_double(row.record.x_next)
              << ',' << format_double(row.theta) << '\n';
    } else {
      *sink << "trajectory,x_final,lyapunov,theta_mean\n";
      for (const auto& t : res.trajectories)
        *sink << t.index << ',' << format_double(t.x_final) << ',' << format_double(t.lyapunov)
              << ',' << format_double(t.theta_mean) << '\n';
    }
    return kExitOk;
  }
  Json j = config_json(cfg);
  Json rows = Json::array();
  for (const auto& t : res.trajectories)
    rows.push_back(Json{{"trajectory", t.index},
                        {"x_final", t.x_final},
                        {"lyapunov", t.lyapunov},
                        {"theta_mean", t.theta_mean}});
  j["trajectories_summary"] = rows;
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_coverage(const Options& o, std::ostream& out) {
  const SimConfig cfg = sim_config(o);
  const CoverageReport rep = block_coverage(cfg, o.block_len, o.cutoff);
  Sink sink(o.out_path, out);
  if (want_csv(o)) {
    *sink << "s,d,frequency,std_error,reference\n";
    for (const auto& [sd, r] : rep.singles)
      *sink << sd.s << ',' << sd.d << ',' << format_double(r.estimate) << ','
            << format_double(r.std_error) << ',' << opt_double(r.reference) << '\n';
    return kExitOk;
  }
  Json j = config_json(cfg);
  j["block_len"] = rep.block_len;
  j["alphabet_size"] = rep.alphabet.size();
  j["possible"] = rep.possible;
  j["observed"] = rep.observed;
  j["windows"] = rep.windows;
  Json missing = Json::array();
  for (const auto& word : rep.missing) {
    std::string s;
    for (const auto& sd : word) s += to_string(sd);
    missing.push_back(s);
  }
  j["missing"] = missing;
  Json singles = Json::array();
  for (const auto& [sd, r] : rep.singles) {
    Json row = to_json(r);
    row["s"] = sd.s;
    row["d"] = sd.d;
    singles.push_back(row);
  }
  j["singles"] = singles;
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

int cmd_hitting(const Options& o, std::ostream& out) {
  const SimConfig cfg = sim_config(o);
  const HittingReport rep = switch_hitting_mc(cfg, o.max_steps);
  Sink sink(o.out_path, out);
  if (want_csv(o)) {
    *sink << "steps,count\n";
    for (const auto& [n, count] : rep.histogram) *sink << n << ',' << count << '\n';
    return kExitOk;
  }
  Json j = config_json(cfg);
  j["max_steps"] = o.max_steps;
  j["failures"] = rep.failures;
  j["max_observed"] = rep.max_observed;
  Json hist = Json::object();
  for (const auto& [n, count] : rep.histogram) hist[std::to_string(n)] = count;
  j["histogram"] = hist;
  *sink << dump_json(j) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Random c-Luroth transformations: expansions, orbit classification, Markov "
               "densities and Monte Carlo statistics.",
               "rluroth"};
  app.footer(kSchemas);
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--c", o.c, "cut point c in [0, 1/2], as P/Q or decimal")->capture_default_str();
    sub->add_option("--p", o.p, "probability of omega bit 0")->capture_default_str();
    sub->add_option("--seed", o.seed, "master seed")->capture_default_str();
    sub->add_option("--format", o.format, "csv or json")->capture_default_str();
    sub->add_option("--out", o.out_path, "write results to this file");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
  };
  auto stats = [&](CLI::App* sub) {
    sub->add_option("--steps", o.steps, "steps per trajectory")->capture_default_str();
    sub->add_option("--trajectories", o.trajectories, "independent trajectories")->capture_default_str();
    sub->add_option("--x0", o.x0, "fixed start point (default: uniform on [c, 1])");
    sub->add_option("--burn-in", o.burn_in, "steps discarded first (default 1000 if c > 0)");
  };

  auto* expand_cmd = app.add_subcommand("expand", "c-Luroth expansion of x along omega");
  common(expand_cmd);
  expand_cmd->add_option("--x", o.x, "start point");
  expand_cmd->add_option("--omega", o.omega, "WORD, PRE(PERIOD), or random (uses --p, --seed)");
  expand_cmd->add_option("--steps", o.steps, "number of steps")->capture_default_str();
  expand_cmd->add_flag("--real", o.real, "binary64 orbit instead of exact rationals");

  auto* psi_cmd = app.add_subcommand("psi", "evaluate psi of a digit sequence");
  common(psi_cmd);
  psi_cmd->add_option("--digits", o.digits, "prefix, e.g. \"(0,2)(1,2)\" (preperiod with --period)");
  psi_cmd->add_option("--period", o.period, "period word for the exact periodic limit");
  psi_cmd->add_option("--csv", o.csv_path, "exact expand CSV to reconstruct x from ('-' = stdin)");

  auto* classify_cmd = app.add_subcommand("classify", "classify the expansions of a rational x");
  common(classify_cmd);
  classify_cmd->add_option("--x", o.x, "rational point");
  classify_cmd->add_option("--emit-graph", o.emit_graph, "write the orbit graph as DOT ('-' = stdout)");
  classify_cmd->add_option("--node-cap", o.node_cap, "orbit graph size limit")->capture_default_str();
  classify_cmd->add_option("--expansions", o.expansions, "also list this many periodic expansions");
  classify_cmd->add_option("--max-period", o.max_period, "longest period listed")->capture_default_str();

  auto* markov_cmd = app.add_subcommand("markov", "Markov partition points for rational c");
  common(markov_cmd);
  markov_cmd->add_option("--cap", o.cap, "closure size limit")->capture_default_str();

  auto* density_cmd = app.add_subcommand("density", "exact stationary density");
  common(density_cmd);
  density_cmd->add_option("--eval", o.eval, "evaluate the density at this point");
  density_cmd->add_flag("--unmerged", o.unmerged, "report every Markov cell");
  density_cmd->add_option("--cap", o.cap, "closure size limit")->capture_default_str();

  auto* freq_cmd = app.add_subcommand("freq", "digit frequencies");
  common(freq_cmd);
  stats(freq_cmd);
  freq_cmd->add_flag("--exact", o.exact, "exact frequencies from the stationary density");
  freq_cmd->add_option("--cutoff", o.cutoff, "largest digit reported when c = 0")->capture_default_str();
  freq_cmd->add_option("--cap", o.cap, "closure size limit")->capture_default_str();

  auto* lyap_cmd = app.add_subcommand("lyapunov", "Lyapunov exponent");
  common(lyap_cmd);
  stats(lyap_cmd);
  lyap_cmd->add_flag("--exact", o.exact, "exact value from the stationary density");
  lyap_cmd->add_option("--series", o.series, "enclose the c = 0 series truncated at D");
  lyap_cmd->add_option("--cap", o.cap, "closure size limit")->capture_default_str();

  auto* theta_cmd = app.add_subcommand("theta-stats", "approximation coefficient statistics");
  common(theta_cmd);
  stats(theta_cmd);
  theta_cmd->add_option("--grid-points", o.grid_points, "CDF grid k/K, k = 1..K")->capture_default_str();

  auto* sim_cmd = app.add_subcommand("simulate", "simulate trajectories");
  common(sim_cmd);
  stats(sim_cmd);
  sim_cmd->add_option("--trace", o.trace, "emit up to this many per-step rows");

  auto* cov_cmd = app.add_subcommand("coverage", "sign-digit block coverage");
  common(cov_cmd);
  stats(cov_cmd);
  cov_cmd->add_option("--block-len", o.block_len, "block length")->capture_default_str();
  cov_cmd->add_option("--cutoff", o.cutoff, "largest digit in the alphabet when c = 0")->capture_default_str();

  auto* hit_cmd = app.add_subcommand("hitting", "first entrance time into the switch region");
  common(hit_cmd);
  stats(hit_cmd);
  hit_cmd->add_option("--max-steps", o.max_steps, "give up after this many steps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (expand_cmd->parsed()) return cmd_expand(o, out);
    if (psi_cmd->parsed()) return cmd_psi(o, out);
    if (classify_cmd->parsed()) return cmd_classify(o, out);
    if (markov_cmd->parsed()) return cmd_markov(o, out);
    if (density_cmd->parsed()) return cmd_density(o, out);
    if (freq_cmd->parsed()) return cmd_freq(o, out);
    if (lyap_cmd->parsed()) return cmd_lyapunov(o, out);
    if (theta_cmd->parsed()) return cmd_theta(o, out);
    if (sim_cmd->parsed()) return cmd_simulate(o, out);
    if (cov_cmd->parsed()) return cmd_coverage(o, out);
    if (hit_cmd->parsed()) return cmd_hitting(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace rluroth::cli
