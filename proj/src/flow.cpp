#include "anoneq/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace anoneq {

namespace {

// Blocking-flow DFS with per-node edge cursors.
long dinic_dfs(FlowNetwork& net, std::vector<int>& level, std::vector<std::size_t>& cursor,
               int node, long limit) {
  if (node == net.sink) return limit;
  for (std::size_t& c = cursor[node]; c < net.adjacency[node].size(); ++c) {
    const int id = net.adjacency[node][c];
    FlowEdge& edge = net.edges[id];
    const long residual = edge.cap - edge.flow;
    if (residual <= 0 || level[edge.to] != level[node] + 1) continue;
    const long pushed = dinic_dfs(net, level, cursor, edge.to, std::min(limit, residual));
    if (pushed > 0) {
      edge.flow += pushed;
      net.edges[id ^ 1].flow -= pushed;
      return pushed;
    }
  }
  return 0;
}

struct ValueSpec {
  double value;
  long theta;
};

// Shared construction: one pmf of the other players' strategy-2 count per
// candidate value (anonymity makes it player-independent), then one
// best-response test per (player, value) pair.
FlowNetwork build_candidate_network(const AnonymousGame& game, std::vector<ValueSpec> specs,
                                    double eps, double tol) {
  const Eigen::Index n = game.players();
  long total = 0;
  for (const auto& spec : specs) {
    if (spec.theta < 0) throw std::invalid_argument("negative strategy-value multiplicity");
    total += spec.theta;
  }
  if (total != n) throw std::invalid_argument("strategy-value multiplicities must sum to n");

  const int value_count = static_cast<int>(specs.size());
  FlowNetwork net = make_network(2 + static_cast<int>(n) + value_count, 0, 1);
  net.players = static_cast<int>(n);
  net.player_edges.assign(n, {});
  for (Eigen::Index i = 0; i < n; ++i) add_edge(net, net.source, 2 + static_cast<int>(i), 1);
  for (int v = 0; v < value_count; ++v) {
    StrategyValueNode node;
    node.value = specs[v].value;
    node.theta = specs[v].theta;
    node.node = 2 + static_cast<int>(n) + v;
    add_edge(net, node.node, net.sink, node.theta);
    net.values.push_back(node);
  }

  for (int v = 0; v < value_count; ++v) {
    if (specs[v].theta <= 0) continue;
    // Opponent partition: the candidate multiset with one unit removed here.
    Eigen::VectorXd others(n - 1);
    Eigen::Index w = 0;
    for (int u = 0; u < value_count; ++u) {
      const long copies = specs[u].theta - (u == v ? 1 : 0);
      for (long c = 0; c < copies; ++c) others(w++) = specs[u].value;
    }
    const CountPmf pmf = poisson_binomial(others);
    const double sigma = specs[v].value;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u1 = expected_utility(game, pmf, i, 1);
      const double u2 = expected_utility(game, pmf, i, 2);
      const double best = std::max(u1, u2);
      bool ok;
      if (sigma == 0.0) {
        ok = best - u1 <= eps + tol;
      } else if (sigma == 1.0) {
        ok = best - u2 <= eps + tol;
      } else {
        ok = best - std::min(u1, u2) <= eps + tol;
      }
      if (ok) {
        const int id = add_edge(net, 2 + static_cast<int>(i), net.values[v].node, 1);
        net.player_edges[i].emplace_back(id, v);
      }
    }
  }
  return net;
}

}  // namespace

FlowNetwork make_network(int node_count, int source, int sink) {
  if (node_count < 2 || source == sink || source < 0 || sink < 0 || source >= node_count ||
      sink >= node_count) {
    throw std::invalid_argument("bad network shape");
  }
  FlowNetwork net;
  net.node_count = node_count;
  net.source = source;
  net.sink = sink;
  net.adjacency.assign(node_count, {});
  return net;
}

int add_edge(FlowNetwork& net, int from, int to, long cap) {
  if (from < 0 || from >= net.node_count || to < 0 || to >= net.node_count) {
    throw std::invalid_argument("edge endpoint out of range");
  }
  if (cap < 0) throw std::invalid_argument("negative capacity");
  const int id = static_cast<int>(net.edges.size());
  net.edges.push_back(FlowEdge{to, cap, 0});
  net.edges.push_back(FlowEdge{from, 0, 0});
  net.adjacency[from].push_back(id);
  net.adjacency[to].push_back(id + 1);
  return id;
}

long max_flow(FlowNetwork& net) {
  for (auto& edge : net.edges) edge.flow = 0;
  long value = 0;
  std::vector<int> level(net.node_count);
  std::vector<std::size_t> cursor(net.node_count);
  while (true) {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> frontier;
    frontier.push(net.source);
    level[net.source] = 0;
    while (!frontier.empty()) {
      const int node = frontier.front();
      frontier.pop();
      for (const int id : net.adjacency[node]) {
        const FlowEdge& edge = net.edges[id];
        if (edge.cap - edge.flow > 0 && level[edge.to] == -1) {
          level[edge.to] = level[node] + 1;
          frontier.push(edge.to);
        }
      }
    }
    if (level[net.sink] == -1) break;
    std::fill(cursor.begin(), cursor.end(), 0);
    while (true) {
      const long pushed =
          dinic_dfs(net, level, cursor, net.source, std::numeric_limits<long>::max());
      if (pushed == 0) break;
      value += pushed;
    }
  }
  return value;
}

FlowNetwork build_network_uniform(const AnonymousGame& game, long m, double q, long m_prime,
                                  double eps, double tol) {
  const Eigen::Index n = game.players();
  if (m < 0 || m_prime < 0 || m + m_prime > n) {
    throw std::invalid_argument("need 0 <= m, m', m + m' <= n");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("shared probability out of [0,1]");

  // {0, q, 1} as a set: q at the boundary merges with the pure values.
  std::vector<ValueSpec> specs;
  const long at_zero = n - m - m_prime;
  if (q == 0.0) {
    specs.push_back({0.0, at_zero + m});
    specs.push_back({1.0, m_prime});
  } else if (q == 1.0) {
    specs.push_back({0.0, at_zero});
    specs.push_back({1.0, m + m_prime});
  } else {
    specs.push_back({0.0, at_zero});
    specs.push_back({q, m});
    specs.push_back({1.0, m_prime});
  }
  return build_candidate_network(game, std::move(specs), eps, tol);
}

FlowNetwork build_network_sparse(const AnonymousGame& game, long m, long m_prime,
                                 const std::vector<long>& phi, int k, double eps, double tol) {
  if (k < 2) throw std::invalid_argument("quantization parameter k must be at least 2");
  const Eigen::Index n = game.players();
  const long cells = static_cast<long>(k) * k;
  if (static_cast<long>(phi.size()) != cells + 1) {
    throw std::invalid_argument("phi must have k^2+1 entries");
  }
  long phi_total = 0;
  for (const long count : phi) {
    if (count < 0) throw std::invalid_argument("negative phi entry");
    phi_total += count;
  }
  if (phi_total != m) throw std::invalid_argument("phi must sum to m");
  if (m < 0 || m >= static_cast<long>(k) * k * k) {
    throw std::invalid_argument("sparse candidates need m < k^3");
  }
  if (m_prime < 0 || m + m_prime > n) throw std::invalid_argument("need m + m' <= n");

  std::vector<ValueSpec> specs;
  specs.reserve(phi.size());
  for (long g = 0; g <= cells; ++g) {
    long theta = phi[g];
    if (g == 0) theta += n - m - m_prime;
    if (g == cells) theta += m_prime;
    specs.push_back({static_cast<double>(g) / static_cast<double>(cells), theta});
  }
  return build_candidate_network(game, std::move(specs), eps, tol);
}

std::optional<MixedProfile> extract_assignment(const FlowNetwork& net) {
  if (net.players <= 0) throw std::invalid_argument("network carries no player annotations");
  long value = 0;
  for (const int id : net.adjacency[net.source]) {
    if ((id & 1) == 0) value += net.edges[id].flow;
  }
  if (value != net.players) return std::nullopt;

  MixedProfile profile(net.players);
  std::vector<long> counts(net.values.size(), 0);
  for (int i = 0; i < net.players; ++i) {
    int chosen = -1;
    for (const auto& [id, v] : net.player_edges[i]) {
      if (net.edges[id].flow == 1) {
        chosen = v;
        break;
      }
    }
    if (chosen < 0) throw std::logic_error("saturated player without an assigned value");
    profile(i) = net.values[chosen].value;
    ++counts[chosen];
  }
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] != net.values[v].theta) {
      throw std::logic_error("extracted counts disagree with the candidate partition");
    }
  }
  return profile;
}

}  // namespace anoneq
