#include "lll/runtime.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

namespace lll {

namespace {

std::string node_str(NodeId v) { return std::to_string(v); }

}  // namespace

Network::Network(std::vector<std::vector<NodeId>> adj) : adj_(std::move(adj)) {
  const size_t n = adj_.size();
  for (size_t v = 0; v < n; ++v) {
    auto& nb = adj_[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (NodeId u : nb) {
      if (u >= n)
        throw InvariantViolation("Network: neighbor id out of range");
      if (u == v) throw InvariantViolation("Network: self loop at node " +
                                           node_str(static_cast<NodeId>(v)));
    }
  }
  for (size_t v = 0; v < n; ++v)
    for (NodeId u : adj_[v])
      if (!std::binary_search(adj_[u].begin(), adj_[u].end(),
                              static_cast<NodeId>(v)))
        throw InvariantViolation("Network: edge " + node_str(NodeId(v)) + "-" +
                                 node_str(u) + " is not symmetric");
}

Network Network::from_dependency_graph(const LLLInstance& inst) {
  return Network(dependency_graph(inst));
}

const std::vector<NodeId>& Network::neighbors(NodeId v) const {
  if (v >= adj_.size())
    throw InvariantViolation("Network: node id out of range");
  return adj_[v];
}

std::vector<int> Network::distances(const std::vector<NodeId>& sources) const {
  if (sources.empty())
    throw InvariantViolation("Network::distances: empty source set");
  std::vector<int> dist(adj_.size(), kInfiniteRadius);
  std::vector<NodeId> queue;
  for (NodeId s : sources) {
    if (s >= adj_.size())
      throw InvariantViolation("Network::distances: source out of range");
    if (dist[s] == kInfiniteRadius) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  for (size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    for (NodeId w : adj_[u])
      if (dist[w] == kInfiniteRadius) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

std::vector<NodeId> Network::ball(NodeId center, int r) const {
  if (center >= adj_.size())
    throw InvariantViolation("Network::ball: center out of range");
  if (r < 0) return {};
  std::vector<int> dist(adj_.size(), -1);
  std::vector<NodeId> queue{center};
  dist[center] = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    if (dist[u] == r) continue;
    for (NodeId w : adj_[u])
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

int Network::diameter_of(const std::vector<NodeId>& nodes) const {
  int diam = 0;
  for (NodeId v : nodes) {
    std::vector<int> dist = distances({v});
    for (NodeId u : nodes) {
      if (dist[u] == kInfiniteRadius) return kInfiniteRadius;
      diam = std::max(diam, dist[u]);
    }
  }
  return diam;
}

Decomposition network_decomposition(const Network& g,
                                    const DecompositionParams& params,
                                    Rng& rng) {
  const size_t n = g.size();
  if (n == 0)
    throw InvariantViolation("network_decomposition: empty network");

  Decomposition d;
  if (n <= static_cast<size_t>(params.fallback_threshold)) {
    // Deterministic fallback: one cluster per connected component, each with
    // its own color.
    std::vector<char> seen(n, 0);
    for (NodeId v = 0; v < n; ++v) {
      if (seen[v]) continue;
      std::vector<NodeId> comp{v};
      seen[v] = 1;
      for (size_t head = 0; head < comp.size(); ++head)
        for (NodeId w : g.neighbors(comp[head]))
          if (!seen[w]) {
            seen[w] = 1;
            comp.push_back(w);
          }
      std::sort(comp.begin(), comp.end());
      d.clusters.push_back(std::move(comp));
      d.color.push_back(static_cast<int>(d.clusters.size()) - 1);
    }
  } else {
    int cap = params.growth_cap;
    if (cap <= 0) {
      int lg = 0;
      while ((size_t(1) << lg) < n) ++lg;
      cap = lg + 2;
    }
    // Phase = color. Within a phase, balls are carved from the nodes still
    // available to the phase, and each carved ball's boundary shell is
    // deferred to a later phase; any same-phase path between two clusters
    // would have to run through a deferred node, so same-phase clusters are
    // never adjacent.
    std::vector<char> remaining(n, 1);
    size_t left = n;
    int phase = 0;
    while (left > 0) {
      std::vector<char> available = remaining;
      for (NodeId c = 0; c < n; ++c) {
        if (!available[c]) continue;
        int r = 0;
        while (r < cap && rng.next_bit()) ++r;
        std::vector<int> dist(n, -1);
        std::vector<NodeId> order{c};
        dist[c] = 0;
        for (size_t head = 0; head < order.size(); ++head) {
          NodeId u = order[head];
          if (dist[u] > r) continue;  // shell nodes are leaves
          for (NodeId w : g.neighbors(u))
            if (available[w] && dist[w] < 0) {
              dist[w] = dist[u] + 1;
              order.push_back(w);
            }
        }
        std::vector<NodeId> cluster;
        for (NodeId u : order) {
          available[u] = 0;
          if (dist[u] <= r) {
            cluster.push_back(u);
            remaining[u] = 0;
            --left;
          }
        }
        std::sort(cluster.begin(), cluster.end());
        d.clusters.push_back(std::move(cluster));
        d.color.push_back(phase);
      }
      ++phase;
    }
  }

  d.num_colors = 0;
  for (int c : d.color) d.num_colors = std::max(d.num_colors, c + 1);
  d.cluster_of.assign(n, 0);
  for (size_t k = 0; k < d.clusters.size(); ++k)
    for (NodeId v : d.clusters[k]) d.cluster_of[v] = static_cast<uint32_t>(k);
  d.diameter_bound = 0;
  for (const auto& cluster : d.clusters)
    d.diameter_bound = std::max(d.diameter_bound, g.diameter_of(cluster));
  validate_decomposition(g, d);
  return d;
}

void validate_decomposition(const Network& g, const Decomposition& d) {
  const size_t n = g.size();
  if (d.clusters.size() != d.color.size())
    throw InvariantViolation("decomposition: one color per cluster required");
  std::vector<int> owner(n, -1);
  for (size_t k = 0; k < d.clusters.size(); ++k) {
    const auto& cluster = d.clusters[k];
    if (cluster.empty())
      throw InvariantViolation("decomposition: empty cluster");
    for (size_t i = 0; i < cluster.size(); ++i) {
      NodeId v = cluster[i];
      if (v >= n)
        throw InvariantViolation("decomposition: node id out of range");
      if (i > 0 && cluster[i - 1] >= v)
        throw InvariantViolation("decomposition: cluster not sorted");
      if (owner[v] >= 0)
        throw InvariantViolation("decomposition: node " + node_str(v) +
                                 " is in two clusters");
      owner[v] = static_cast<int>(k);
    }
    if (d.color[k] < 0 || d.color[k] >= d.num_colors)
      throw InvariantViolation("decomposition: color out of range");
  }
  for (NodeId v = 0; v < n; ++v)
    if (owner[v] < 0)
      throw InvariantViolation("decomposition: node " + node_str(v) +
                               " is in no cluster");
  if (d.cluster_of.size() != n)
    throw InvariantViolation("decomposition: cluster_of has the wrong size");
  for (NodeId v = 0; v < n; ++v)
    if (d.cluster_of[v] != static_cast<uint32_t>(owner[v]))
      throw InvariantViolation("decomposition: cluster_of mismatch at node " +
                               node_str(v));
  for (NodeId v = 0; v < n; ++v)
    for (NodeId u : g.neighbors(v)) {
      if (owner[v] == owner[u]) continue;
      if (d.color[owner[v]] == d.color[owner[u]])
        throw InvariantViolation(
            "decomposition: adjacent clusters share color " +
            std::to_string(d.color[owner[v]]));
    }
  for (const auto& cluster : d.clusters)
    if (g.diameter_of(cluster) > d.diameter_bound)
      throw InvariantViolation(
          "decomposition: cluster diameter exceeds the declared bound");
}

std::vector<EventId> variable_ownership(const LLLInstance& inst) {
  std::vector<EventId> owner(inst.num_variables());
  for (VariableId v = 0; v < inst.num_variables(); ++v) {
    const auto& events = inst.events_of(v);
    if (events.empty())
      throw InvariantViolation("variable_ownership: variable '" +
                               inst.variable(v).name +
                               "' appears in no event");
    owner[v] = events.front();
  }
  return owner;
}

MemoryView::MemoryView(const Network& g, std::vector<NodeMemory>& memories,
                       NodeId center, int scan, int radius)
    : memories_(&memories), center_(center), scan_(scan), radius_(radius) {
  if (center >= g.size())
    throw InvariantViolation("MemoryView: center out of range");
  if (radius < 0) throw InvariantViolation("MemoryView: negative radius");
  std::vector<int> dist(g.size(), -1);
  std::vector<NodeId> queue{center};
  dist[center] = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    if (dist[u] == radius) continue;
    for (NodeId w : g.neighbors(u))
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  for (NodeId v = 0; v < g.size(); ++v)
    if (dist[v] >= 0) {
      visible_.push_back(v);
      dist_.push_back(dist[v]);
    }
}

size_t MemoryView::index_of(NodeId u) const {
  auto it = std::lower_bound(visible_.begin(), visible_.end(), u);
  if (it == visible_.end() || *it != u)
    throw InvariantViolation("slocal: node " + node_str(u) +
                             " is outside the radius-" +
                             std::to_string(radius_) + " ball of node " +
                             node_str(center_));
  return static_cast<size_t>(it - visible_.begin());
}

bool MemoryView::sees(NodeId u) const {
  return std::binary_search(visible_.begin(), visible_.end(), u);
}

int MemoryView::distance(NodeId u) const { return dist_[index_of(u)]; }

NodeMemory& MemoryView::memory(NodeId u) {
  return (*memories_)[visible_[index_of(u)]];
}

const NodeMemory& MemoryView::memory(NodeId u) const {
  return (*memories_)[visible_[index_of(u)]];
}

int RadiusLog::max_radius() const {
  int m = 0;
  for (const auto& e : entries) m = std::max(m, e.radius);
  return m;
}

namespace {

void check_engine_inputs(const Network& g,
                         const std::vector<NodeMemory>& memories,
                         const std::vector<NodeId>& active) {
  if (memories.size() != g.size())
    throw InvariantViolation("slocal: one memory per node required");
  for (size_t v = 0; v < memories.size(); ++v)
    if (memories[v].id != v)
      throw InvariantViolation("slocal: memory ids must match node ids");
  for (size_t i = 0; i < active.size(); ++i) {
    if (active[i] >= g.size())
      throw InvariantViolation("slocal: active node out of range");
    if (i > 0 && active[i - 1] >= active[i])
      throw InvariantViolation("slocal: active set must be sorted");
  }
}

// Runs all scans over the given active set, appending one entry per
// activation. A nonnegative limit turns radius overruns into a failed run
// (returns false) instead of continuing; that is the trial mode of the
// message-passing simulation.
bool run_scans(SlocalAlgorithm& alg, const Network& g,
               std::vector<NodeMemory>& memories,
               const std::vector<NodeId>& active, int limit,
               std::vector<RadiusLog::Entry>& entries) {
  const int nscans = alg.scans();
  if (nscans < 1)
    throw InvariantViolation("slocal: algorithm declares no scans");
  for (int j = 1; j <= nscans; ++j) {
    for (NodeId v : active) {
      int ell = 0;
      for (;;) {
        MemoryView view(g, memories, v, j, ell);
        StepResult r = alg.step(v, j, view);
        if (r == StepResult::kStop) {
          entries.push_back({j, v, ell});
          break;
        }
        if (limit >= 0 && ell + 1 > limit) return false;
        if (g.ball(v, ell + 1).size() == view.visible().size())
          throw InvariantViolation(
              "slocal: step at node " + node_str(v) +
              " keeps growing after its ball saturated the component");
        ++ell;
      }
    }
  }
  return true;
}

bool sorted_subset(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

RadiusLog slocal_run_sequential(SlocalAlgorithm& alg, const Network& g,
                                std::vector<NodeMemory>& memories,
                                const std::vector<NodeId>& active) {
  check_engine_inputs(g, memories, active);
  RadiusLog log;
  run_scans(alg, g, memories, active, -1, log.entries);
  for (const auto& e : log.entries)
    log.rounds += static_cast<uint64_t>(std::max(1, e.radius));
  return log;
}

RadiusLog slocal_run_local_sim(SlocalAlgorithm& alg, const Network& g,
                               std::vector<NodeMemory>& memories,
                               const std::vector<NodeId>& active) {
  check_engine_inputs(g, memories, active);
  RadiusLog log;
  if (active.empty()) return log;

  const std::vector<NodeMemory> init = memories;
  const size_t n = g.size();
  int imax = 1;
  while ((size_t(1) << imax) < n) ++imax;

  // Distances from each active node, for the power-graph components.
  std::map<NodeId, std::vector<int>> adist;
  for (NodeId v : active) adist[v] = g.distances({v});

  struct Outcome {
    std::vector<NodeId> aset;  // the component this node simulated
    std::vector<NodeMemory> mem;
    std::vector<RadiusLog::Entry> entries;
  };
  std::map<NodeId, Outcome> outcomes;

  for (NodeId v : active) {
    uint64_t rv = 0;
    bool done = false;
    for (int i = 1; i <= imax && !done; ++i) {
      // Component of v among active nodes at pairwise distance <= 2^(i+1).
      const int t = 1 << (i + 1);
      std::vector<NodeId> comp{v};
      std::vector<char> in_comp_by_pos(active.size(), 0);
      for (size_t head = 0; head < comp.size(); ++head) {
        const auto& dist = adist.at(comp[head]);
        for (size_t pos = 0; pos < active.size(); ++pos) {
          if (in_comp_by_pos[pos]) continue;
          NodeId u = active[pos];
          if (u == v) {
            in_comp_by_pos[pos] = 1;
            continue;
          }
          if (dist[u] <= t) {
            in_comp_by_pos[pos] = 1;
            comp.push_back(u);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      rv += (uint64_t(1) << (i + 1)) * comp.size();

      std::vector<NodeMemory> scratch = init;
      std::vector<RadiusLog::Entry> entries;
      if (run_scans(alg, g, scratch, comp, 1 << i, entries)) {
        outcomes[v] =
            Outcome{std::move(comp), std::move(scratch), std::move(entries)};
        done = true;
      }
    }
    // At the top level the limit is at least the largest possible radius, so
    // a terminating algorithm cannot fail there.
    if (!done)
      throw InvariantViolation(
          "slocal: simulation failed at the top guess level");
    log.rounds = std::max(log.rounds, rv);
  }

  // Cancellation: a simulation whose region is strictly contained in another
  // is dropped; of two equal regions the smaller id survives. The component
  // regions are nested or disjoint, so the survivors tile the active set.
  std::vector<NodeId> committed;
  for (NodeId v : active) {
    const auto& av = outcomes.at(v).aset;
    bool canceled = false;
    for (NodeId u : active) {
      if (u == v) continue;
      const auto& au = outcomes.at(u).aset;
      if (sorted_subset(av, au) && (av.size() < au.size() || u < v)) {
        canceled = true;
        break;
      }
    }
    if (!canceled) committed.push_back(v);
  }

  std::vector<NodeId> covered;
  for (NodeId v : committed) {
    const auto& aset = outcomes.at(v).aset;
    covered.insert(covered.end(), aset.begin(), aset.end());
  }
  std::sort(covered.begin(), covered.end());
  if (covered != active)
    throw InvariantViolation(
        "slocal: committed simulations do not tile the active set");

  // Write regions of surviving simulations must be pairwise disjoint before
  // their updates can be merged.
  std::vector<NodeId> all_touched;
  for (NodeId v : committed) {
    const Outcome& oc = outcomes.at(v);
    std::vector<NodeId> touched;
    for (const auto& e : oc.entries) {
      auto b = g.ball(e.node, e.radius);
      touched = sorted_union(touched, b);
    }
    for (NodeId w = 0; w < n; ++w)
      if (!(oc.mem[w] == init[w]) &&
          !std::binary_search(touched.begin(), touched.end(), w))
        throw InvariantViolation(
            "slocal: simulation wrote outside its accessed balls");
    for (NodeId w : touched) memories[w] = oc.mem[w];
    all_touched.insert(all_touched.end(), touched.begin(), touched.end());
    log.entries.insert(log.entries.end(), oc.entries.begin(),
                       oc.entries.end());
  }
  std::sort(all_touched.begin(), all_touched.end());
  for (size_t i = 1; i < all_touched.size(); ++i)
    if (all_touched[i - 1] == all_touched[i])
      throw InvariantViolation(
          "slocal: committed simulations touch overlapping regions");

  std::sort(log.entries.begin(), log.entries.end(),
            [](const RadiusLog::Entry& a, const RadiusLog::Entry& b) {
              return a.scan != b.scan ? a.scan < b.scan : a.node < b.node;
            });
  return log;
}

}  // namespace lll
