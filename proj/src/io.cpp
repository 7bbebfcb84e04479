#include "rluroth/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rluroth {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump(std::ostringstream& out, const Json& v, int indent, int depth) {
  const std::string pad = indent >= 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent >= 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent >= 0 ? "\n" : "";
  const char* sep = indent >= 0 ? ": " : ":";
  switch (v.type()) {
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      out << (std::isfinite(x) ? format_double(x) : "null");
      break;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        break;
      }
      out << "{" << nl;
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << "," << nl;
        first = false;
        out << pad << Json(it.key()).dump() << sep;
        dump(out, it.value(), indent, depth + 1);
      }
      out << nl << close_pad << "}";
      break;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        break;
      }
      out << "[" << nl;
      bool first = true;
      for (const auto& item : v) {
        if (!first) out << "," << nl;
        first = false;
        out << pad;
        dump(out, item, indent, depth + 1);
      }
      out << nl << close_pad << "]";
      break;
    }
    default:
      out << v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::ostringstream out;
  dump(out, value, indent, 0);
  return out.str();
}

Json to_json(const BigRational& q) { return to_fraction_string(q); }

Json to_json(const SignDigit& sd) { return Json::array({sd.s, sd.d}); }

Json to_json(const StatReport& report) {
  Json j;
  j["estimate"] = report.estimate;
  j["std_error"] = report.std_error;
  j["n_samples"] = report.n_samples;
  j["reference"] = report.reference ? Json(*report.reference) : Json(nullptr);
  j["seed"] = report.seed;
  return j;
}

Json to_json(const PeriodicExpansion& e) {
  Json pre = Json::array(), period = Json::array();
  for (const auto& sd : e.preperiod) pre.push_back(to_json(sd));
  for (const auto& sd : e.period) period.push_back(to_json(sd));
  return Json{{"preperiod", pre}, {"period", period}, {"text", to_string(e)}};
}

Json to_json(const LoopClass& loop, const OrbitGraph& graph) {
  Json word = Json::array(), bits = Json::array();
  for (const auto& sd : loop.label_word) word.push_back(to_json(sd));
  for (int b : loop.representative_bits) bits.push_back(b);
  return Json{{"anchor", to_json(graph.nodes[loop.anchor])}, {"labels", word}, {"bits", bits}};
}

template <Scalar S>
Json expansion_json(const ExpansionRecord<S>& rec) {
  Json j;
  if constexpr (std::is_same_v<S, double>)
    j["x"] = rec.start;
  else
    j["x"] = to_json(rec.start);
  Json steps = Json::array();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    Json row;
    row["n"] = i + 1;
    row["omega_bit"] = rec.omega_used[i];
    row["s"] = rec.digits[i].s;
    row["d"] = rec.digits[i].d;
    if constexpr (std::is_same_v<S, double>)
      row["x"] = rec.orbit[i];
    else
      row["x"] = to_json(rec.orbit[i]);
    row["p_n"] = rec.convergents[i].p.get_str();
    row["q_n"] = rec.convergents[i].q.get_str();
    row["theta_n"] = rec.thetas[i];
    steps.push_back(std::move(row));
  }
  j["steps"] = std::move(steps);
  return j;
}

template Json expansion_json(const ExpansionRecord<BigRational>&);
template Json expansion_json(const ExpansionRecord<double>&);

template <Scalar S>
void write_expansion_csv(std::ostream& out, const ExpansionRecord<S>& rec) {
  constexpr bool real = std::is_same_v<S, double>;
  out << "n,omega_bit,s,d," << (real ? "x" : "x_num,x_den") << ",p_n,q_n,theta_n\n";
  for (std::size_t i = 0; i < rec.size(); ++i) {
    out << i + 1 << ',' << rec.omega_used[i] << ',' << rec.digits[i].s << ','
        << rec.digits[i].d << ',';
    if constexpr (real)
      out << format_double(rec.orbit[i]);
    else
      out << rec.orbit[i].get_num().get_str() << ',' << rec.orbit[i].get_den().get_str();
    out << ',' << rec.convergents[i].p.get_str() << ',' << rec.convergents[i].q.get_str() << ','
        << format_double(rec.thetas[i]) << '\n';
  }
}

template void write_expansion_csv(std::ostream&, const ExpansionRecord<BigRational>&);
template void write_expansion_csv(std::ostream&, const ExpansionRecord<double>&);

void write_dot(std::ostream& out, const OrbitGraph& graph) {
  out << "digraph orbit {\n";
  for (std::size_t v = 0; v < graph.size(); ++v) {
    out << "  \"" << to_fraction_string(graph.nodes[v]) << "\"";
    if (v == 0 || graph.in_switch[v]) {
      out << " [";
      if (v == 0) out << "shape=doublecircle";
      if (v == 0 && graph.in_switch[v]) out << ",";
      if (graph.in_switch[v]) out << "style=filled";
      out << "]";
    }
    out << ";\n";
  }
  for (std::size_t v = 0; v < graph.size(); ++v) {
    for (const auto& e : graph.edges[v]) {
      std::string bits;
      if (e.bits & OrbitEdge::kBit0) bits += "0";
      if (e.bits & OrbitEdge::kBit1) bits += bits.empty() ? "1" : ",1";
      out << "  \"" << to_fraction_string(graph.nodes[v]) << "\" -> \""
          << to_fraction_string(graph.nodes[e.target]) << "\" [label=\"" << to_string(e.label)
          << ";" << bits << "\"];\n";
    }
  }
  out << "}\n";
}

template <class T>
Json density_json(const PiecewiseConstantDensity<T>& density, bool merged) {
  Json j;
  j["c"] = to_json(density.c);
  Json bps = Json::array(), vals = Json::array();
  for (const auto& b : density.breakpoints) bps.push_back(to_json(b));
  for (const auto& v : density.values) {
    if constexpr (std::is_same_v<T, double>)
      vals.push_back(v);
    else
      vals.push_back(to_json(v));
  }
  j["breakpoints"] = std::move(bps);
  j["values"] = std::move(vals);
  j["merged"] = merged;
  return j;
}

template Json density_json(const PiecewiseConstantDensity<BigRational>&, bool);
template Json density_json(const PiecewiseConstantDensity<double>&, bool);

}  // namespace rluroth
