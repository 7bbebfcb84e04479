#pragma once

#include "rluroth/expansion.hpp"
#include "rluroth/markov.hpp"
#include "rluroth/orbits.hpp"
#include "rluroth/simulation.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace rluroth {

using Json = nlohmann::ordered_json;

/// 17 significant digits.
std::string format_double(double x);

/// Like Json::dump, but binary64 numbers always carry 17 significant digits.
std::string dump_json(const Json& value, int indent = 2);

Json to_json(const BigRational& q);  ///< "num/den"
Json to_json(const SignDigit& sd);   ///< [s, d]
Json to_json(const StatReport& report);
Json to_json(const PeriodicExpansion& e);
Json to_json(const LoopClass& loop, const OrbitGraph& graph);

template <Scalar S>
Json expansion_json(const ExpansionRecord<S>& rec);

/// One row per step: n, omega_bit, s, d, x_num, x_den (exact) or x (binary64),
/// p_n, q_n, theta_n.
template <Scalar S>
void write_expansion_csv(std::ostream& out, const ExpansionRecord<S>& rec);

/// Nodes are "p/q"; edge labels read "(s,d);bits".
void write_dot(std::ostream& out, const OrbitGraph& graph);

template <class T>
Json density_json(const PiecewiseConstantDensity<T>& density, bool merged);

}  // namespace rluroth
