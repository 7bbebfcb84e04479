#include "rluroth/orbits.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>

namespace rluroth {

std::size_t OrbitGraph::index_of(const BigRational& x) const {
  auto it = index_.find(x);
  return it == index_.end() ? npos : it->second;
}

OrbitGraph build_orbit_graph(const BigRational& x, const BigRational& c, std::size_t node_cap) {
  if (node_cap < 1) throw DomainError("node_cap must be >= 1");
  const CutGeometry geo(c);
  if (x == 0) throw DomainError("orbit graph: digits are undefined at x = 0");
  require_domain(geo, x, "build_orbit_graph");

  OrbitGraph g;
  g.c = c;
  auto intern = [&](const BigRational& v) {
    auto [it, fresh] = g.index_.emplace(v, g.nodes.size());
    if (fresh) {
      if (g.nodes.size() >= node_cap)
        throw CapExceeded("orbit graph exceeded " + std::to_string(node_cap) + " nodes");
      g.nodes.push_back(v);
      g.edges.emplace_back();
      g.in_switch.push_back(false);
    }
    return it->second;
  };

  intern(x);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const BigRational v = g.nodes[i];
    const Location where = geo.locate(v);
    const bool sw = where.zone == Zone::Switch;
    g.in_switch[i] = sw;
    std::vector<OrbitEdge> out;
    if (sw) {
      for (int bit = 0; bit < 2; ++bit) {
        const Step<BigRational> st = step(bit, geo, v);
        const std::size_t t = intern(st.next);
        out.push_back(OrbitEdge{bit == 0 ? OrbitEdge::kBit0 : OrbitEdge::kBit1, t, st.symbol});
      }
    } else {
      const Step<BigRational> st = step(0, geo, v);
      const std::size_t t = intern(st.next);
      out.push_back(OrbitEdge{OrbitEdge::kBit0 | OrbitEdge::kBit1, t, st.symbol});
    }
    g.edges[i] = std::move(out);
  }
  return g;
}

DeterministicOrbit deterministic_avoids_switch(const BigRational& x, const BigRational& c) {
  const CutGeometry geo(c);
  if (x == 0) throw DomainError("deterministic orbit: digits are undefined at x = 0");
  require_domain(geo, x, "deterministic_avoids_switch");
  DeterministicOrbit out;
  std::map<BigRational, std::size_t> seen;
  BigRational cur = x;
  while (true) {
    if (auto it = seen.find(cur); it != seen.end()) {
      out.avoids_switch = true;
      out.cycle_start = it->second;
      return out;
    }
    seen.emplace(cur, out.path.size());
    out.path.push_back(cur);
    const Location where = geo.locate(cur);
    if (where.zone == Zone::Switch) return out;
    cur = apply_branch(branch_for(where.zone, 0), where.digit, cur);
  }
}

namespace {

/// Tarjan's algorithm without recursion. Returns the component id of each node.
std::vector<std::size_t> scc_ids(const OrbitGraph& g, std::size_t& count) {
  const std::size_t n = g.size();
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> work;  // (node, next edge)
  std::size_t next_index = 0;
  count = 0;

  for (std::size_t s = 0; s < n; ++s) {
    if (index[s] != kUnset) continue;
    work.emplace_back(s, 0);
    while (!work.empty()) {
      auto& [v, e] = work.back();
      if (e == 0 && index[v] == kUnset) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (e < g.edges[v].size()) {
        const std::size_t w = g.edges[v][e++].target;
        if (index[w] == kUnset) {
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        while (true) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
          if (w == v) break;
        }
        ++count;
      }
      const std::size_t done = v;
      work.pop_back();
      if (!work.empty()) {
        const std::size_t parent = work.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return comp;
}

std::vector<bool> nontrivial_components(const OrbitGraph& g, const std::vector<std::size_t>& comp,
                                        std::size_t count) {
  std::vector<std::size_t> sizes(count, 0);
  for (std::size_t id : comp) ++sizes[id];
  std::vector<bool> nontrivial(count, false);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (sizes[comp[v]] > 1) nontrivial[comp[v]] = true;
    for (const auto& e : g.edges[v])
      if (e.target == v) nontrivial[comp[v]] = true;
  }
  return nontrivial;
}

}  // namespace

std::vector<bool> recurrent_nodes(const OrbitGraph& graph) {
  std::size_t count = 0;
  const auto comp = scc_ids(graph, count);
  const auto nontrivial = nontrivial_components(graph, comp, count);
  std::vector<bool> out(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) out[v] = nontrivial[comp[v]];
  return out;
}

bool has_branching_cycle(const OrbitGraph& graph) {
  std::size_t count = 0;
  const auto comp = scc_ids(graph, count);
  const auto nontrivial = nontrivial_components(graph, comp, count);
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if (!graph.in_switch[v] || !nontrivial[comp[v]]) continue;
    const auto& out = graph.edges[v];
    if (out.size() == 2 && comp[out[0].target] == comp[v] && comp[out[1].target] == comp[v])
      return true;
  }
  return false;
}

std::vector<LoopClass> enumerate_loop_classes(const OrbitGraph& graph, std::size_t y,
                                              std::size_t max_classes) {
  const std::size_t n = graph.size();
  if (y >= n) throw DomainError("enumerate_loop_classes: node out of range");
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();

  // dist[v]: fewest edges from v to y without passing through y on the way.
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t v = 0; v < n; ++v)
    for (const auto& e : graph.edges[v]) preds[e.target].push_back(v);
  std::vector<std::size_t> dist(n, kFar);
  dist[y] = 0;
  std::deque<std::size_t> queue{y};
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t u : preds[v]) {
      if (u == y || dist[u] != kFar) continue;
      dist[u] = dist[v] + 1;
      queue.push_back(u);
    }
  }

  const std::size_t max_len = 4 * n;
  std::vector<LoopClass> out;
  std::set<std::vector<SignDigit>> seen;
  struct Frame {
    std::size_t node;
    std::size_t edge;
  };
  // Iterative deepening, so classes come out shortest first.
  for (std::size_t limit = 1; limit <= max_len && out.size() < max_classes; ++limit) {
    std::vector<Frame> frames{{y, 0}};
    std::vector<const OrbitEdge*> path;
    while (!frames.empty() && out.size() < max_classes) {
      Frame& f = frames.back();
      if (f.edge >= graph.edges[f.node].size()) {
        frames.pop_back();
        if (!path.empty()) path.pop_back();
        continue;
      }
      const OrbitEdge& e = graph.edges[f.node][f.edge++];
      const std::size_t len = path.size() + 1;
      if (e.target == y) {
        if (len != limit) continue;
        LoopClass loop;
        loop.anchor = y;
        for (const OrbitEdge* p : path) {
          loop.label_word.push_back(p->label);
          loop.representative_bits.push_back(p->representative_bit());
        }
        loop.label_word.push_back(e.label);
        loop.representative_bits.push_back(e.representative_bit());
        if (seen.insert(loop.label_word).second) out.push_back(std::move(loop));
        continue;
      }
      if (dist[e.target] == kFar || len + dist[e.target] > limit) continue;
      path.push_back(&e);
      frames.push_back({e.target, 0});
    }
  }
  return out;
}

std::string to_string(OrbitClass kind) {
  switch (kind) {
    case OrbitClass::UniquePeriodic: return "unique-periodic";
    case OrbitClass::CountablyPeriodic: return "countably-periodic";
    case OrbitClass::UncountablyMany: return "uncountably-many";
  }
  return "unknown";
}

Classification classify(const BigRational& x, const BigRational& c, std::size_t node_cap) {
  Classification out;
  out.graph = build_orbit_graph(x, c, node_cap);
  out.deterministic = deterministic_avoids_switch(x, c);
  if (out.deterministic.avoids_switch) {
    out.kind = OrbitClass::UniquePeriodic;
    return out;
  }
  const auto recurrent = recurrent_nodes(out.graph);
  // The witness is the anchor whose two shortest inequivalent loops are shortest overall.
  std::vector<LoopClass> singles;
  std::vector<LoopClass> best;
  std::size_t best_len = 0;
  for (std::size_t y = 0; y < out.graph.size(); ++y) {
    if (!recurrent[y]) continue;
    auto loops = enumerate_loop_classes(out.graph, y, 2);
    if (loops.size() >= 2) {
      const std::size_t len = loops[0].label_word.size() + loops[1].label_word.size();
      if (best.empty() || len < best_len) {
        best = std::move(loops);
        best_len = len;
      }
      continue;
    }
    if (!loops.empty()) singles.push_back(std::move(loops.front()));
  }
  if (!best.empty()) {
    out.kind = OrbitClass::UncountablyMany;
    out.loops = std::move(best);
    return out;
  }
  out.kind = OrbitClass::CountablyPeriodic;
  out.loops = std::move(singles);
  return out;
}

PeriodicExpansion canonical(PeriodicExpansion e) {
  if (e.period.empty()) throw DomainError("canonical: empty period");
  const std::size_t n = e.period.size();
  for (std::size_t k = 1; k <= n; ++k) {
    if (n % k != 0) continue;
    bool repeats = true;
    for (std::size_t i = k; i < n && repeats; ++i) repeats = e.period[i] == e.period[i - k];
    if (repeats) {
      e.period.resize(k);
      break;
    }
  }
  while (!e.preperiod.empty() && e.preperiod.back() == e.period.back()) {
    e.preperiod.pop_back();
    std::rotate(e.period.rbegin(), e.period.rbegin() + 1, e.period.rend());
  }
  return e;
}

std::string to_string(const PeriodicExpansion& e) {
  std::string s;
  for (const auto& sd : e.preperiod) s += to_string(sd);
  s += "[";
  for (const auto& sd : e.period) s += to_string(sd);
  s += "]^inf";
  return s;
}

std::vector<PeriodicExpansion> enumerate_expansions(const BigRational& x, const BigRational& c,
                                                    std::size_t max_count,
                                                    std::size_t max_period,
                                                    std::size_t node_cap) {
  if (max_count < 1 || max_period < 1) throw DomainError("enumerate_expansions: bounds must be positive");
  const OrbitGraph g = build_orbit_graph(x, c, node_cap);
  const std::size_t max_depth = g.size() + max_period;
  constexpr std::size_t kWorkCap = 4'000'000;

  auto by_length = [](const PeriodicExpansion& a, const PeriodicExpansion& b) {
    const std::size_t la = a.preperiod.size() + a.period.size();
    const std::size_t lb = b.preperiod.size() + b.period.size();
    return la != lb ? la < lb : a < b;
  };
  std::set<PeriodicExpansion, decltype(by_length)> found(by_length);
  std::size_t work = 0;

  // Iterative deepening: after the pass at depth D every expansion whose
  // canonical form has total length <= D is present.
  for (std::size_t depth = 1; depth <= max_depth && work < kWorkCap; ++depth) {
    std::vector<std::size_t> nodes{0};
    std::vector<SignDigit> labels;
    std::vector<std::size_t> next_edge{0};
    while (!next_edge.empty() && work < kWorkCap) {
      const std::size_t v = nodes.back();
      std::size_t& ei = next_edge.back();
      if (labels.size() == depth || ei >= g.edges[v].size()) {
        next_edge.pop_back();
        nodes.pop_back();
        if (!labels.empty()) labels.pop_back();
        continue;
      }
      const OrbitEdge& e = g.edges[v][ei++];
      ++work;
      nodes.push_back(e.target);
      labels.push_back(e.label);
      next_edge.push_back(0);
      if (labels.size() == depth) {
        const std::size_t t = labels.size();
        for (std::size_t k = 1; k <= std::min(max_period, t); ++k) {
          if (nodes[t - k] != nodes[t]) continue;
          PeriodicExpansion cand{{labels.begin(), labels.end() - static_cast<std::ptrdiff_t>(k)},
                                 {labels.end() - static_cast<std::ptrdiff_t>(k), labels.end()}};
          found.insert(canonical(std::move(cand)));
        }
      }
    }
    std::size_t short_enough = 0;
    for (const auto& e : found)
      if (e.preperiod.size() + e.period.size() <= depth) ++short_enough;
    if (short_enough >= max_count) break;
  }

  std::vector<PeriodicExpansion> out;
  for (const auto& e : found) {
    if (out.size() >= max_count) break;
    if (psi_periodic(e.preperiod, e.period) != x) continue;  // never expected
    out.push_back(e);
  }
  return out;
}

}  // namespace rluroth
