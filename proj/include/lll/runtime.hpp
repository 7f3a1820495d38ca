#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lll/error.hpp"
#include "lll/instance.hpp"
#include "lll/rng.hpp"

namespace lll {

using NodeId = uint32_t;

// Undirected network the distributed phases run on. For LLL sampling this is
// the dependency graph itself; the Las Vegas wrapper builds its own copy of
// the communication graph. Immutable once constructed.
class Network {
 public:
  // Adjacency lists, index = node id. Lists are normalized (sorted, deduped);
  // self loops or asymmetric edges are an error.
  explicit Network(std::vector<std::vector<NodeId>> adj);

  static Network from_dependency_graph(const LLLInstance& inst);

  size_t size() const { return adj_.size(); }
  const std::vector<NodeId>& neighbors(NodeId v) const;

  // BFS distance from the source set to every node; kInfiniteRadius when
  // unreachable. Sources must be nonempty and in range.
  std::vector<int> distances(const std::vector<NodeId>& sources) const;

  // Nodes within distance r of the center, sorted. r < 0 yields {}.
  std::vector<NodeId> ball(NodeId center, int r) const;

  // Largest pairwise distance (in the full network) among the given nodes.
  // Nodes in different components make the diameter infinite.
  int diameter_of(const std::vector<NodeId>& nodes) const;

 private:
  std::vector<std::vector<NodeId>> adj_;
};

// Weak network decomposition: a partition into low-diameter clusters with a
// proper coloring of the cluster graph (same-color clusters non-adjacent).
struct Decomposition {
  std::vector<std::vector<NodeId>> clusters;  // sorted; partition of nodes
  std::vector<int> color;                     // per cluster
  int num_colors = 0;
  int diameter_bound = 0;            // max measured cluster diameter
  std::vector<uint32_t> cluster_of;  // node -> cluster index
};

struct DecompositionParams {
  // Graphs with at most this many nodes use the deterministic fallback:
  // one cluster per connected component, one color per cluster.
  int fallback_threshold = 16;
  // Cap on the carving radius; 0 derives ceil(log2 n) + 2 from the size.
  int growth_cap = 0;
};

// Randomized ball carving: repeated phases carve geometric-radius balls from
// the remaining nodes, deferring each ball's boundary shell to a later phase
// so that same-phase clusters are never adjacent. Phases become colors. The
// output is validated before it is returned.
Decomposition network_decomposition(const Network& g,
                                    const DecompositionParams& params,
                                    Rng& rng);

// Recomputes the three decomposition invariants (partition, proper coloring,
// cluster diameters within the declared bound) and throws on any failure.
void validate_decomposition(const Network& g, const Decomposition& d);

// Owner of each variable: the smallest-id event it appears in. The owner
// sets partition the variable set; a variable in no event is an error.
std::vector<EventId> variable_ownership(const LLLInstance& inst);

// Local memory of one node. Everything a step may depend on lives here: the
// ids fix the processing order, (seed, uses) is the node's replayable
// randomness stream, and state/values/output hold algorithm data. Copies are
// deep, so a simulation can run on a snapshot.
struct NodeMemory {
  NodeId id = 0;
  bool active = false;
  uint64_t seed = 0;  // stream label
  uint64_t uses = 0;  // draws consumed so far
  std::map<std::string, int64_t> state;
  std::map<VariableId, Value> values;
  std::optional<int64_t> output;

  bool operator==(const NodeMemory&) const = default;
};

// Next adaptive draw from the node's stream: a fresh engine derived from
// (seed, uses). Advancing `uses` inside the memory makes a replay from any
// snapshot continue the stream instead of repeating it, even though a single
// draw consumes an unpredictable number of words.
inline Rng next_draw(NodeMemory& m) {
  return Rng(mix64(m.seed ^ mix64(0x5ca1ab1e00000000ull + m.uses++)));
}

// Read/write window handed to a step: the memories within the current ball
// around the processing node. Any access outside the ball is an error; this
// is what makes the engine's radius accounting trustworthy.
class MemoryView {
 public:
  MemoryView(const Network& g, std::vector<NodeMemory>& memories,
             NodeId center, int scan, int radius);

  NodeId center() const { return center_; }
  int scan() const { return scan_; }
  int radius() const { return radius_; }
  const std::vector<NodeId>& visible() const { return visible_; }
  bool sees(NodeId u) const;
  int distance(NodeId u) const;  // from the center; u must be visible
  NodeMemory& memory(NodeId u);
  const NodeMemory& memory(NodeId u) const;

 private:
  size_t index_of(NodeId u) const;
  std::vector<NodeMemory>* memories_;
  NodeId center_;
  int scan_;
  int radius_;
  std::vector<NodeId> visible_;  // sorted
  std::vector<int> dist_;        // parallel to visible_
};

enum class StepResult {
  kGrow,  // information in the current ball is not enough; enlarge it
  kStop,  // stopping condition met; writes are final for this activation
};

// A multi-scan sequential-local algorithm. The engine activates each active
// node once per scan, growing its ball radius 0, 1, 2, ... and calling step
// until it stops. step must be a deterministic function of the memories it
// can see (draw randomness only through next_draw on visible memories); the
// simulation mode re-runs steps from snapshots and relies on it.
class SlocalAlgorithm {
 public:
  virtual ~SlocalAlgorithm() = default;
  virtual int scans() const = 0;
  virtual StepResult step(NodeId v, int scan, MemoryView& view) = 0;
};

// Radii and round accounting for one engine run. Round estimates follow the
// flooding cost model: gathering a radius-r ball costs max(1, r) rounds.
// Sequential mode charges the sum over activations; the simulation mode
// charges, per active node, 2^(i+1) * |component| for every guess level i it
// tries, and reports the maximum over nodes (the levels run in parallel).
struct RadiusLog {
  struct Entry {
    int scan = 0;
    NodeId node = 0;
    int radius = 0;

    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;  // ordered by (scan, node)
  uint64_t rounds = 0;

  int max_radius() const;
};

// Reference semantics: scans run one after another, active nodes in
// ascending id order within each scan. Memories are updated in place.
// Throws if a step keeps growing after its ball saturated the component.
RadiusLog slocal_run_sequential(SlocalAlgorithm& alg, const Network& g,
                                std::vector<NodeMemory>& memories,
                                const std::vector<NodeId>& active);

// Message-passing simulation of the same run: every active node guesses the
// radius it needs (doubling levels), simulates the whole algorithm on the
// connected component of active nodes it can reach at that level, and the
// overlap-cancellation rule keeps exactly one simulation's updates per
// region. Produces memories identical to the sequential mode whenever step
// honors the determinism contract.
RadiusLog slocal_run_local_sim(SlocalAlgorithm& alg, const Network& g,
                               std::vector<NodeMemory>& memories,
                               const std::vector<NodeId>& active);

}  // namespace lll
