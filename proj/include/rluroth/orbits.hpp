#pragma once

#include "rluroth/core.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rluroth {

struct OrbitEdge {
  static constexpr std::uint8_t kBit0 = 1;
  static constexpr std::uint8_t kBit1 = 2;

  std::uint8_t bits = kBit0 | kBit1;  ///< omega bits that take this edge
  std::size_t target = 0;
  SignDigit label;

  int representative_bit() const { return (bits & kBit0) ? 0 : 1; }
};

/// The exact random orbit of a rational point under both branch maps.
/// Node 0 is the root. Switch nodes carry one edge per omega bit (labels
/// differ in the sign even when the targets coincide); other nodes carry a
/// single edge taken by both bits.
struct OrbitGraph {
  BigRational c;
  std::vector<BigRational> nodes;
  std::vector<std::vector<OrbitEdge>> edges;
  std::vector<bool> in_switch;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t size() const { return nodes.size(); }
  const BigRational& root() const { return nodes.front(); }
  std::size_t index_of(const BigRational& x) const;

 private:
  friend OrbitGraph build_orbit_graph(const BigRational&, const BigRational&, std::size_t);
  std::map<BigRational, std::size_t> index_;
};

inline constexpr std::size_t kDefaultNodeCap = 100000;

/// Breadth-first closure of x under T_{0,c} and T_{1,c}. Throws CapExceeded
/// past node_cap.
OrbitGraph build_orbit_graph(const BigRational& x, const BigRational& c,
                             std::size_t node_cap = kDefaultNodeCap);

struct DeterministicOrbit {
  bool avoids_switch = false;
  std::vector<BigRational> path;  ///< visited points, up to the first repeat or S-hit
  std::size_t cycle_start = 0;    ///< index in path where the cycle begins (if avoids_switch)
};

/// Follows the common branch from x until the orbit cycles or enters S.
DeterministicOrbit deterministic_avoids_switch(const BigRational& x, const BigRational& c);

struct LoopClass {
  std::size_t anchor = 0;
  std::vector<SignDigit> label_word;
  std::vector<int> representative_bits;
};

/// Nodes lying on some cycle (all nodes are reachable from the root).
std::vector<bool> recurrent_nodes(const OrbitGraph& graph);

/// First-return label words at y of length <= 4 * |nodes|, shortest first,
/// at most max_classes of them. Empty when y is transient.
std::vector<LoopClass> enumerate_loop_classes(const OrbitGraph& graph, std::size_t y,
                                              std::size_t max_classes = 64);

/// Independent criterion: some strongly connected component contains a
/// switch node whose two edges both stay inside the component.
bool has_branching_cycle(const OrbitGraph& graph);

enum class OrbitClass { UniquePeriodic, CountablyPeriodic, UncountablyMany };

std::string to_string(OrbitClass kind);

struct Classification {
  OrbitClass kind = OrbitClass::UniquePeriodic;
  OrbitGraph graph;
  DeterministicOrbit deterministic;  ///< witness for UniquePeriodic
  /// UncountablyMany: two inequivalent loops at one anchor. CountablyPeriodic:
  /// the single loop class at each recurrent node.
  std::vector<LoopClass> loops;
};

Classification classify(const BigRational& x, const BigRational& c,
                        std::size_t node_cap = kDefaultNodeCap);

struct PeriodicExpansion {
  std::vector<SignDigit> preperiod;
  std::vector<SignDigit> period;

  friend auto operator<=>(const PeriodicExpansion&, const PeriodicExpansion&) = default;
};

/// Shortest preperiod and primitive period describing the same infinite word.
PeriodicExpansion canonical(PeriodicExpansion e);

std::string to_string(const PeriodicExpansion& e);

/// Distinct ultimately periodic expansions realisable in the orbit graph,
/// shortest first, each checked by exact psi closure against x.
std::vector<PeriodicExpansion> enumerate_expansions(const BigRational& x, const BigRational& c,
                                                    std::size_t max_count,
                                                    std::size_t max_period,
                                                    std::size_t node_cap = kDefaultNodeCap);

}  // namespace rluroth
