#include "qpsa/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

Graph Graph::from_hamiltonian(const LocalHamiltonian& h) {
  if (h.k() != 2) throw InputError("interaction graph requires k = 2");
  Graph g;
  g.n = h.n();
  g.adj.resize(g.n);
  std::set<std::pair<int, int>> seen;
  for (const auto& t : h.terms()) {
    int u = t.support[0], v = t.support[1];
    if (seen.emplace(u, v).second) {
      g.adj[u].push_back(v);
      g.adj[v].push_back(u);
    }
  }
  for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
  return g;
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Graph g;
  g.n = n;
  g.adj.resize(n);
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen.emplace(u, v).second) {
      g.adj[u].push_back(v);
      g.adj[v].push_back(u);
    }
  }
  for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
  return g;
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n; ++u)
    for (int v : adj[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

int TreeDecomposition::width() const {
  int w = 0;
  for (const auto& bag : bags) w = std::max(w, int(bag.size()) - 1);
  return w;
}

TreeDecomposition tree_decompose_heuristic(const Graph& g) {
  const int n = g.n;
  TreeDecomposition td;
  if (n == 0) return td;
  // Min-fill elimination ordering on a working copy of the adjacency.
  std::vector<std::set<int>> adj(n);
  for (int u = 0; u < n; ++u) adj[u] = std::set<int>(g.adj[u].begin(), g.adj[u].end());
  std::vector<bool> eliminated(n, false);
  std::vector<int> order;
  std::vector<std::vector<int>> bag_of(n);

  for (int round = 0; round < n; ++round) {
    int best = -1;
    long best_fill = -1;
    for (int v = 0; v < n; ++v) {
      if (eliminated[v]) continue;
      long fill = 0;
      std::vector<int> nb(adj[v].begin(), adj[v].end());
      for (size_t i = 0; i < nb.size(); ++i)
        for (size_t j = i + 1; j < nb.size(); ++j)
          if (!adj[nb[i]].count(nb[j])) ++fill;
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    std::vector<int> nb(adj[best].begin(), adj[best].end());
    bag_of[best] = nb;
    bag_of[best].push_back(best);
    std::sort(bag_of[best].begin(), bag_of[best].end());
    for (size_t i = 0; i < nb.size(); ++i)
      for (size_t j = i + 1; j < nb.size(); ++j) {
        adj[nb[i]].insert(nb[j]);
        adj[nb[j]].insert(nb[i]);
      }
    for (int u : nb) adj[u].erase(best);
    adj[best].clear();
    eliminated[best] = true;
    order.push_back(best);
  }

  // Bag of v connects to the bag of the first-eliminated vertex among its
  // bag-mates eliminated after v.
  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[order[i]] = i;
  td.bags.resize(n);
  for (int i = 0; i < n; ++i) td.bags[i] = bag_of[order[i]];
  for (int i = 0; i < n; ++i) {
    int later = -1;
    for (int u : td.bags[i])
      if (position[u] > i && (later < 0 || position[u] < position[later]))
        later = u;
    if (later >= 0) td.edges.emplace_back(i, position[later]);
  }
  return td;
}

std::vector<TdViolation> validate_tree_decomposition(
    const Graph& g, const TreeDecomposition& td) {
  std::vector<TdViolation> violations;
  const int bags = int(td.bags.size());
  std::vector<bool> covered(g.n, false);
  for (const auto& bag : td.bags)
    for (int v : bag)
      if (v >= 0 && v < g.n) covered[v] = true;
  for (int v = 0; v < g.n; ++v)
    if (!covered[v]) violations.push_back({"vertex-cover", v, -1});

  for (int u = 0; u < g.n; ++u)
    for (int v : g.adj[u]) {
      if (u > v) continue;
      bool ok = false;
      for (const auto& bag : td.bags) {
        bool hu = std::binary_search(bag.begin(), bag.end(), u);
        bool hv = std::binary_search(bag.begin(), bag.end(), v);
        if (hu && hv) {
          ok = true;
          break;
        }
      }
      if (!ok) violations.push_back({"edge-cover", u, v});
    }

  // Running intersection: bags containing each vertex induce a subtree.
  std::vector<std::vector<int>> tree_adj(bags);
  for (auto [a, b] : td.edges) {
    tree_adj[a].push_back(b);
    tree_adj[b].push_back(a);
  }
  for (int v = 0; v < g.n; ++v) {
    std::vector<int> holders;
    for (int b = 0; b < bags; ++b)
      if (std::binary_search(td.bags[b].begin(), td.bags[b].end(), v))
        holders.push_back(b);
    if (holders.size() <= 1) continue;
    std::set<int> holder_set(holders.begin(), holders.end());
    std::deque<int> queue = {holders[0]};
    std::set<int> reached = {holders[0]};
    while (!queue.empty()) {
      int b = queue.front();
      queue.pop_front();
      for (int nb : tree_adj[b])
        if (holder_set.count(nb) && !reached.count(nb)) {
          reached.insert(nb);
          queue.push_back(nb);
        }
    }
    if (reached.size() != holders.size())
      violations.push_back({"running-intersection", v, -1});
  }
  return violations;
}

namespace {

std::vector<std::vector<int>> components_of(const Graph& g,
                                            const std::vector<bool>& removed,
                                            const std::set<std::pair<int, int>>&
                                                removed_edges) {
  std::vector<std::vector<int>> comps;
  std::vector<bool> seen(g.n, false);
  for (int s = 0; s < g.n; ++s) {
    if (seen[s] || removed[s]) continue;
    std::vector<int> comp;
    std::deque<int> queue = {s};
    seen[s] = true;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (int v : g.adj[u]) {
        if (seen[v] || removed[v]) continue;
        auto e = std::minmax(u, v);
        if (removed_edges.count({e.first, e.second})) continue;
        seen[v] = true;
        queue.push_back(v);
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace

BakerLayering baker_layering(const Graph& g, int kparam, std::uint64_t seed,
                             const std::vector<double>& edge_weights) {
  if (kparam < 1) throw InputError("kparam must be >= 1");
  BakerLayering out;
  out.layer_of.assign(g.n, -1);
  auto edges = g.edge_list();
  std::vector<double> weights = edge_weights;
  if (weights.empty()) weights.assign(edges.size(), 1.0);
  if (weights.size() != edges.size())
    throw InputError("edge weight count mismatch");
  for (double w : weights) out.total_weight += w;

  // BFS layers per component from a seed-chosen root.
  Rng rng(split_seed(seed, "baker"));
  std::vector<bool> seen(g.n, false);
  std::vector<int> vertices(g.n);
  std::iota(vertices.begin(), vertices.end(), 0);
  if (g.n > 0) {
    int first_root = int(rng.next_below(g.n));
    std::swap(vertices[0], vertices[first_root]);
  }
  for (int s : vertices) {
    if (seen[s]) continue;
    seen[s] = true;
    out.layer_of[s] = 0;
    std::deque<int> queue = {s};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : g.adj[u])
        if (!seen[v]) {
          seen[v] = true;
          out.layer_of[v] = out.layer_of[u] + 1;
          queue.push_back(v);
        }
    }
  }

  // Boundary edges cross layers j -> j+1; offset i removes those with
  // j = i (mod kparam+1). Every edge is removed by at most one offset.
  const int period = kparam + 1;
  std::vector<double> removed_at(period, 0.0);
  for (size_t e = 0; e < edges.size(); ++e) {
    int lu = out.layer_of[edges[e].first], lv = out.layer_of[edges[e].second];
    if (lu == lv) continue;
    int j = std::min(lu, lv);
    removed_at[j % period] += weights[e];
  }
  int best_offset = 0;
  for (int i = 1; i < period; ++i)
    if (removed_at[i] < removed_at[best_offset]) best_offset = i;
  out.offset = best_offset;
  out.removed_weight = removed_at[best_offset];
  if (out.removed_weight > out.total_weight / period + 1e-9)
    throw std::runtime_error("baker averaging bound violated");

  std::set<std::pair<int, int>> removed_set;
  for (size_t e = 0; e < edges.size(); ++e) {
    int lu = out.layer_of[edges[e].first], lv = out.layer_of[edges[e].second];
    if (lu == lv) continue;
    if (std::min(lu, lv) % period == best_offset) {
      out.removed_edges.push_back(edges[e]);
      removed_set.insert(edges[e]);
    }
  }
  out.components = components_of(g, std::vector<bool>(g.n, false), removed_set);
  return out;
}

int ClusterPartition::cluster_of(int v) const { return cluster_index[v]; }

ClusterPartition recursive_separators(const Graph& g,
                                      const TreeDecomposition& td, int r) {
  const int width = td.width();
  if (r < width + 1)
    throw InputError("r must be at least width+1 = " +
                     std::to_string(width + 1));
  if (!validate_tree_decomposition(g, td).empty())
    throw InputError("invalid tree decomposition");

  std::vector<bool> removed(g.n, false);
  std::set<std::pair<int, int>> no_edges;

  // Recursively remove the bag that best balances the remainder.
  std::deque<std::vector<int>> pending;
  for (auto& comp : components_of(g, removed, no_edges))
    pending.push_back(std::move(comp));
  while (!pending.empty()) {
    std::vector<int> comp = std::move(pending.front());
    pending.pop_front();
    if (int(comp.size()) <= r) continue;
    std::set<int> in_comp(comp.begin(), comp.end());
    int best_bag = -1;
    int best_score = g.n + 1;
    for (size_t b = 0; b < td.bags.size(); ++b) {
      std::vector<int> cut;
      for (int v : td.bags[b])
        if (in_comp.count(v)) cut.push_back(v);
      if (cut.empty()) continue;
      std::vector<bool> rm = removed;
      for (int v : cut) rm[v] = true;
      int largest = 0;
      for (const auto& piece : components_of(g, rm, no_edges)) {
        if (!in_comp.count(piece[0])) continue;
        largest = std::max(largest, int(piece.size()));
      }
      if (largest < best_score) {
        best_score = largest;
        best_bag = int(b);
      }
    }
    if (best_bag < 0) break;  // cannot split further
    for (int v : td.bags[best_bag])
      if (in_comp.count(v)) removed[v] = true;
    for (const auto& piece : components_of(g, removed, no_edges))
      if (in_comp.count(piece[0]) && int(piece.size()) > r)
        pending.push_back(piece);
  }

  // Add-back pass: re-insert removed vertices that keep components <= r.
  for (int v = 0; v < g.n; ++v) {
    if (!removed[v]) continue;
    removed[v] = false;
    bool ok = true;
    for (const auto& piece : components_of(g, removed, no_edges))
      if (int(piece.size()) > r) {
        ok = false;
        break;
      }
    if (!ok) removed[v] = true;
  }

  ClusterPartition out;
  for (int v = 0; v < g.n; ++v)
    if (removed[v]) out.removed_vertices.push_back(v);
  out.clusters = components_of(g, removed, no_edges);
  // Removed vertices become singleton clusters (free spins).
  for (int v : out.removed_vertices) out.clusters.push_back({v});
  out.cluster_index.assign(g.n, -1);
  for (size_t c = 0; c < out.clusters.size(); ++c)
    for (int v : out.clusters[c]) out.cluster_index[v] = int(c);
  // Removed vertices are realized as removing their incident edges.
  for (int v : out.removed_vertices)
    for (int u : g.adj[v]) {
      auto e = std::minmax(u, v);
      out.removed_edges.emplace_back(e.first, e.second);
    }
  std::sort(out.removed_edges.begin(), out.removed_edges.end());
  out.removed_edges.erase(
      std::unique(out.removed_edges.begin(), out.removed_edges.end()),
      out.removed_edges.end());

  const double bound = kSeparatorConstant * (width + 1) *
                       double(g.n) / double(r);
  if (double(out.removed_vertices.size()) > bound + 1e-9)
    throw std::runtime_error("separator removed-vertex bound violated");
  return out;
}

namespace {

// Terms of H entirely inside one cluster, reindexed to the cluster.
LocalHamiltonian cluster_hamiltonian(const LocalHamiltonian& h,
                                     const std::vector<int>& cluster) {
  std::vector<int> new_index(h.n(), -1);
  for (size_t i = 0; i < cluster.size(); ++i) new_index[cluster[i]] = int(i);
  std::vector<LocalTerm> terms;
  for (const auto& t : h.terms()) {
    bool inside = true;
    for (int v : t.support)
      if (new_index[v] < 0) inside = false;
    if (!inside) continue;
    LocalTerm nt;
    for (int v : t.support) nt.support.push_back(new_index[v]);
    nt.matrix = t.matrix;
    terms.push_back(std::move(nt));
  }
  return LocalHamiltonian(int(cluster.size()), h.d(), h.k(), std::move(terms));
}

struct ClusterContext {
  std::vector<LocalHamiltonian> hams;
  std::vector<const std::vector<int>*> clusters;
  std::vector<LocalTerm> cross_terms;  // terms crossing clusters (dropped in H')
  double weyl_budget = 0.0;
};

ClusterContext split_by_clusters(const LocalHamiltonian& h,
                                 const ClusterPartition& p) {
  ClusterContext ctx;
  for (const auto& cluster : p.clusters) {
    if (int(cluster.size()) > kClusterQubitCap)
      throw SizeLimitError("cluster of size " +
                           std::to_string(cluster.size()) +
                           " exceeds the 14-qubit diagonalization cap");
    ctx.hams.push_back(cluster_hamiltonian(h, cluster));
    ctx.clusters.push_back(&cluster);
  }
  for (size_t e = 0; e < h.terms().size(); ++e) {
    const auto& t = h.terms()[e];
    int c0 = p.cluster_index[t.support[0]];
    bool crossing = false;
    for (int v : t.support)
      if (p.cluster_index[v] != c0) crossing = true;
    if (crossing) {
      ctx.cross_terms.push_back(t);
      ctx.weyl_budget += h.term_norms()[e];
    }
  }
  return ctx;
}

// Tr[h_e (x) rho_u marginals] for a cross-cluster 2-local term.
double cross_term_energy(const LocalTerm& t,
                         const std::vector<MatrixXcd>& site_marginals, int d) {
  const int k = int(t.support.size());
  MatrixXcd joint = MatrixXcd::Identity(1, 1);
  for (int j = 0; j < k; ++j) joint = kron(joint, site_marginals[t.support[j]]);
  (void)d;
  return (t.matrix * joint).trace().real();
}

}  // namespace

ClusterSolveReport cluster_gs(const LocalHamiltonian& h,
                              const ClusterPartition& p) {
  ClusterContext ctx = split_by_clusters(h, p);
  ClusterSolveReport report;
  report.weyl_budget = ctx.weyl_budget;
  std::vector<MatrixXcd> site_marginals(h.n());
  for (size_t c = 0; c < ctx.hams.size(); ++c) {
    auto [energy, state] = exact_ground(ctx.hams[c]);
    report.cluster_values.push_back(energy);
    report.value += energy;
    MatrixXcd rho = state.vector() * state.vector().adjoint();
    const auto& cluster = *ctx.clusters[c];
    for (size_t i = 0; i < cluster.size(); ++i)
      site_marginals[cluster[i]] = partial_trace_keep(
          rho, int(cluster.size()), h.d(), {int(i)});
  }
  for (const auto& t : ctx.cross_terms)
    report.cross_term_energy += cross_term_energy(t, site_marginals, h.d());
  report.state_value = report.value + report.cross_term_energy;
  return report;
}

ClusterSolveReport cluster_fe(const LocalHamiltonian& h,
                              const ClusterPartition& p, double beta) {
  if (beta <= 0) throw InputError("beta must be positive");
  ClusterContext ctx = split_by_clusters(h, p);
  ClusterSolveReport report;
  report.weyl_budget = ctx.weyl_budget;
  std::vector<MatrixXcd> site_marginals(h.n());
  for (size_t c = 0; c < ctx.hams.size(); ++c) {
    double f = exact_free_energy(ctx.hams[c], beta);
    report.cluster_values.push_back(f);
    report.value += f;
    DenseState gibbs = gibbs_state(ctx.hams[c], beta);
    const auto& cluster = *ctx.clusters[c];
    for (size_t i = 0; i < cluster.size(); ++i)
      site_marginals[cluster[i]] = partial_trace_keep(
          gibbs.matrix(), int(cluster.size()), h.d(), {int(i)});
  }
  for (const auto& t : ctx.cross_terms)
    report.cross_term_energy += cross_term_energy(t, site_marginals, h.d());
  // f(sigma) = sum_c F_c + cross terms (the cluster Gibbs state is exact
  // for H', so its entropy is already inside the per-cluster free energies).
  report.state_value = report.value + report.cross_term_energy;
  return report;
}

namespace {

SparsePipelineReport run_pipeline(const LocalHamiltonian& h, int kparam, int r,
                                  double beta, bool free_energy,
                                  std::uint64_t seed) {
  if (kparam < 1) kparam = 4;
  Graph g = Graph::from_hamiltonian(h);
  SparsePipelineReport report;
  std::vector<double> edge_weights;
  {
    auto edges = g.edge_list();
    MatrixXd strengths = h.strength_matrix();
    for (auto [u, v] : edges) edge_weights.push_back(strengths(u, v));
  }
  report.layering = baker_layering(g, kparam, seed, edge_weights);

  // Remove the Baker boundary edges, then split each component with the
  // tree-decomposition separators.
  std::set<std::pair<int, int>> baker_removed(
      report.layering.removed_edges.begin(),
      report.layering.removed_edges.end());
  std::vector<std::pair<int, int>> kept_edges;
  for (auto e : g.edge_list())
    if (!baker_removed.count(e)) kept_edges.push_back(e);
  Graph pruned = Graph::from_edges(g.n, kept_edges);
  report.td = tree_decompose_heuristic(pruned);
  report.td_width = report.td.width();
  report.partition = recursive_separators(pruned, report.td,
                                          std::max(r, report.td_width + 1));
  // Fold the Baker edge removals into the partition bookkeeping.
  for (auto e : report.layering.removed_edges)
    report.partition.removed_edges.push_back(e);
  std::sort(report.partition.removed_edges.begin(),
            report.partition.removed_edges.end());
  report.partition.removed_edges.erase(
      std::unique(report.partition.removed_edges.begin(),
                  report.partition.removed_edges.end()),
      report.partition.removed_edges.end());

  report.solve = free_energy ? cluster_fe(h, report.partition, beta)
                             : cluster_gs(h, report.partition);
  return report;
}

}  // namespace

SparsePipelineReport sparse_gs(const LocalHamiltonian& h, int kparam, int r,
                               std::uint64_t seed) {
  return run_pipeline(h, kparam, r, 1.0, false, seed);
}

SparsePipelineReport sparse_fe(const LocalHamiltonian& h, int kparam, int r,
                               double beta, std::uint64_t seed) {
  return run_pipeline(h, kparam, r, beta, true, seed);
}

}  // namespace qpsa
