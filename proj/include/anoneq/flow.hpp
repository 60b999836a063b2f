#pragma once

// Integral max-flow and the candidate-feasibility networks: players on the
// left, quantized strategy values on the right, an arc wherever the value is
// an eps-best response against the candidate's opponent partition.

#include "anoneq/equilibrium.hpp"
#include "anoneq/game.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace anoneq {

struct FlowEdge {
  int to{0};
  long cap{0};
  long flow{0};
};

struct StrategyValueNode {
  double value{0.0};
  long theta{0};
  int node{0};
};

struct FlowNetwork {
  int node_count{0};
  int source{0};
  int sink{0};
  std::vector<FlowEdge> edges;  // edges 2e and 2e+1 form a residual pair
  std::vector<std::vector<int>> adjacency;

  int players{0};
  std::vector<StrategyValueNode> values;
  // per player: (edge id, index into values) for each best-response arc
  std::vector<std::vector<std::pair<int, int>>> player_edges;
};

FlowNetwork make_network(int node_count, int source, int sink);
int add_edge(FlowNetwork& net, int from, int to, long cap);

// Dinic. Leaves per-edge flows on the network and returns the flow value.
long max_flow(FlowNetwork& net);

// Candidate with m players on a shared probability q, m_prime on 1, the rest
// on 0. Value-equal nodes merge (q may be 0 or 1), and arcs exist only into
// values with positive multiplicity.
FlowNetwork build_network_uniform(const AnonymousGame& game, long m, double q, long m_prime,
                                  double eps, double tol = kDefaultTol);

// Candidate with phi[g] players on g/k^2 for g in 0..k^2 (phi sums to m),
// plus m_prime more on 1 and the rest on 0.
FlowNetwork build_network_sparse(const AnonymousGame& game, long m, long m_prime,
                                 const std::vector<long>& phi, int k, double eps,
                                 double tol = kDefaultTol);

// After max_flow: if the flow saturates every player, reads off each
// player's strategy value; otherwise nullopt.
std::optional<MixedProfile> extract_assignment(const FlowNetwork& net);

}  // namespace anoneq
