#include "lexidiff/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "lexidiff/linalg.hpp"

namespace lexidiff::diffusion {

double intensity(double x, double K) {
  if (!(K > 0.0)) throw ContractViolation("diffusion sharpness K must be > 0");
  if (x < 0.0) throw ContractViolation("diffusion intensity needs x >= 0");
  const double t = std::expm1(K * x);
  // strictly positive even when t*t overflows, so edge weights never vanish
  return std::max(1.0 / (1.0 + t * t), std::numeric_limits<double>::min());
}

void DiffusionParams::validate() const {
  if (!(K > 0.0)) throw ValidationError("K must be > 0");
  if (!(nu0 > 0.0)) throw ValidationError("nu0 must be > 0");
  weights.validate();
}

bool SimilarityDistribution::on_simplex(double tol) const {
  double sum = 0.0;
  for (double v : p) {
    if (v < -tol || v > 1.0 + tol) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

void DiffusionGraph::validate(const DiffusionParams& params) const {
  const int n = reference_count;
  const int m = classified_count;
  const int c = cluster_count;
  if (static_cast<int>(vertices.size()) != n + m + c) {
    throw SolverError("vertex count does not match n + m + c");
  }

  std::vector<double> cluster_size(c, 0.0);
  for (int i = 0; i < n; ++i) {
    if (vertices[i].role != Role::reference || vertices[i].cluster < 0 ||
        vertices[i].cluster >= c) {
      throw SolverError("bad reference vertex " + vertices[i].id);
    }
    cluster_size[vertices[i].cluster] += 1.0;
  }
  for (int i = n; i < n + m; ++i) {
    if (vertices[i].role != Role::classified) {
      throw SolverError("bad classified vertex " + vertices[i].id);
    }
  }
  for (int i = n + m; i < n + m + c; ++i) {
    if (vertices[i].role != Role::hypothetical ||
        vertices[i].cluster != i - n - m) {
      throw SolverError("bad hypothetical vertex " + vertices[i].id);
    }
  }

  std::vector<int> out_degree(vertices.size(), 0);
  for (const Edge& e : edges) {
    if (e.tail < 0 || e.head < 0 ||
        e.tail >= static_cast<int>(vertices.size()) ||
        e.head >= static_cast<int>(vertices.size())) {
      throw SolverError("edge endpoint out of range");
    }
    if (e.weight < 0.0 || e.lambda < 0.0) {
      throw SolverError("negative edge weight or distance");
    }
    ++out_degree[e.tail];

    const Vertex& head = vertices[e.head];
    double expected = 0.0;
    if (mode == GraphMode::directed) {
      if (head.role == Role::classified) {
        throw SolverError("directed graph has an edge into a classified vertex");
      }
      const double nu = head.role == Role::hypothetical
                            ? params.nu0
                            : cluster_size[head.cluster];
      expected = intensity(e.lambda, params.K) / nu;
    } else {
      expected = intensity(e.lambda, params.K);
    }
    if (std::abs(e.weight - expected) > 1e-12 * std::max(1.0, expected)) {
      throw SolverError("edge weight does not match intensity(lambda)/nu");
    }
  }

  for (int i = 0; i < n + m + c; ++i) {
    const bool boundary = i >= n + m;
    if (boundary) {
      if (out_degree[i] != 0) {
        throw SolverError("hypothetical vertex has outgoing edges");
      }
    } else if (mode == GraphMode::directed) {
      if (out_degree[i] != n && !(vertices[i].role == Role::reference)) {
        throw SolverError("classified vertex out-degree must equal n");
      }
      if (vertices[i].role == Role::reference && out_degree[i] != n) {
        throw SolverError("reference vertex out-degree must equal n");
      }
    } else if (out_degree[i] == 0) {
      throw SolverError("non-boundary vertex with no edges");
    }
  }
}

namespace {

DiffusionGraph assemble(const std::vector<std::string>& reference_ids,
                        const std::vector<int>& reference_cluster,
                        const std::vector<std::string>& classified_ids,
                        const std::vector<std::string>& cluster_names,
                        const std::vector<std::vector<double>>& ref_lambda,
                        const std::vector<std::vector<double>>& cls_lambda,
                        const DiffusionParams& params, GraphMode mode) {
  params.validate();
  const int n = static_cast<int>(reference_ids.size());
  const int m = static_cast<int>(classified_ids.size());
  const int c = static_cast<int>(cluster_names.size());
  if (n == 0) throw ValidationError("graph needs at least one reference language");

  DiffusionGraph g;
  g.mode = mode;
  g.reference_count = n;
  g.classified_count = m;
  g.cluster_count = c;
  g.cluster_names = cluster_names;

  std::vector<double> cluster_size(c, 0.0);
  for (int i = 0; i < n; ++i) {
    if (reference_cluster[i] < 0 || reference_cluster[i] >= c) {
      throw ValidationError("reference cluster index out of range");
    }
    cluster_size[reference_cluster[i]] += 1.0;
    g.vertices.push_back({reference_ids[i], DiffusionGraph::Role::reference,
                          reference_cluster[i]});
  }
  for (int k = 0; k < c; ++k) {
    if (cluster_size[k] == 0.0) {
      throw ValidationError("cluster '" + cluster_names[k] +
                            "' has no members in this graph");
    }
  }
  for (int i = 0; i < m; ++i) {
    g.vertices.push_back({classified_ids[i], DiffusionGraph::Role::classified, -1});
  }
  for (int k = 0; k < c; ++k) {
    g.vertices.push_back({cluster_names[k], DiffusionGraph::Role::hypothetical, k});
  }

  const bool directed = mode == GraphMode::directed;
  auto weight_into = [&](int head, double lambda) {
    const double w0 = intensity(lambda, params.K);
    if (!directed) return w0;
    const DiffusionGraph::Vertex& hv = g.vertices[static_cast<std::size_t>(head)];
    const double nu = hv.role == DiffusionGraph::Role::hypothetical
                          ? params.nu0
                          : cluster_size[hv.cluster];
    return w0 / nu;
  };
  auto add_edge = [&](int tail, int head, double lambda) {
    g.edges.push_back({tail, head, lambda, weight_into(head, lambda)});
  };

  // reference <-> reference (both orientations in either mode)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      add_edge(i, j, ref_lambda[i][j]);
    }
  }
  // reference -> own hypothetical vertex, lambda = 0
  for (int i = 0; i < n; ++i) {
    const int h = n + m + reference_cluster[i];
    add_edge(i, h, 0.0);
    // an undirected hypothetical edge normally exists in both directions, but
    // the boundary vertex's equation is replaced by the pinned value, so the
    // reverse orientation is never materialized.
  }
  // classified -> reference; undirected mode adds the reverse orientation
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      add_edge(n + i, j, cls_lambda[i][j]);
      if (!directed) add_edge(j, n + i, cls_lambda[i][j]);
    }
  }
  return g;
}

}  // namespace

DiffusionGraph build_graph_from_distances(
    const std::vector<int>& reference_cluster, int cluster_count,
    const std::vector<std::vector<double>>& ref_lambda,
    const std::vector<std::vector<double>>& classified_lambda,
    const DiffusionParams& params, GraphMode mode) {
  const std::size_t n = reference_cluster.size();
  if (ref_lambda.size() != n) {
    throw ValidationError("ref_lambda must be n x n");
  }
  for (const auto& row : ref_lambda) {
    if (row.size() != n) throw ValidationError("ref_lambda must be n x n");
  }
  for (const auto& row : classified_lambda) {
    if (row.size() != n) throw ValidationError("classified_lambda rows must have n entries");
  }

  std::vector<std::string> ref_ids, cls_ids, cluster_names;
  for (std::size_t i = 0; i < n; ++i) ref_ids.push_back("v" + std::to_string(i + 1));
  for (std::size_t i = 0; i < classified_lambda.size(); ++i) {
    cls_ids.push_back("l" + std::to_string(i + 1));
  }
  for (int k = 0; k < cluster_count; ++k) {
    cluster_names.push_back("h" + std::to_string(k + 1));
  }
  return assemble(ref_ids, reference_cluster, cls_ids, cluster_names, ref_lambda,
                  classified_lambda, params, mode);
}

DiffusionGraph build_graph(const std::vector<LanguageTerm>& terms,
                           const std::vector<ClusterSpec>& clusters,
                           const std::vector<std::string>& classified,
                           const DiffusionParams& params, GraphMode mode) {
  // role lookup; membership in two clusters is a configuration error
  std::map<std::string, int> cluster_of;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    if (clusters[k].members.empty()) {
      throw ValidationError("cluster '" + clusters[k].name + "' is empty");
    }
    for (const std::string& id : clusters[k].members) {
      if (!cluster_of.emplace(id, static_cast<int>(k)).second) {
        throw ValidationError("reference language '" + id +
                              "' appears in more than one cluster");
      }
    }
  }
  const std::set<std::string> classified_set(classified.begin(), classified.end());
  for (const auto& [id, k] : cluster_of) {
    (void)k;
    if (classified_set.count(id) != 0) {
      throw ValidationError("language '" + id +
                            "' is both clustered and classified");
    }
  }

  std::vector<std::string> ref_ids, cls_ids, cluster_names;
  std::vector<int> ref_cluster;
  std::vector<const distance::Translation*> ref_tr, cls_tr;
  for (const ClusterSpec& cluster : clusters) cluster_names.push_back(cluster.name);

  for (const LanguageTerm& term : terms) {
    if (term.translation.words.empty()) {
      throw ValidationError("language '" + term.language +
                            "' has an empty translation");
    }
    const auto it = cluster_of.find(term.language);
    if (it != cluster_of.end()) {
      ref_ids.push_back(term.language);
      ref_cluster.push_back(it->second);
      ref_tr.push_back(&term.translation);
    } else if (classified_set.count(term.language) != 0) {
      cls_ids.push_back(term.language);
      cls_tr.push_back(&term.translation);
    } else {
      throw ValidationError("language '" + term.language +
                            "' is neither clustered nor classified");
    }
  }

  const std::size_t n = ref_ids.size();
  std::vector<std::vector<double>> ref_lambda(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d =
          distance::translation_distance_ref(*ref_tr[i], *ref_tr[j], params.weights);
      ref_lambda[i][j] = d;
      ref_lambda[j][i] = d;
    }
  }
  std::vector<std::vector<double>> cls_lambda(cls_ids.size(),
                                              std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < cls_ids.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cls_lambda[i][j] =
          distance::translation_distance_min(*cls_tr[i], *ref_tr[j], params.weights);
    }
  }

  return assemble(ref_ids, ref_cluster, cls_ids, cluster_names, ref_lambda,
                  cls_lambda, params, mode);
}

SolveResult solve(const DiffusionGraph& graph) {
  const int n = graph.reference_count;
  const int m = graph.classified_count;
  const int c = graph.cluster_count;
  const int unknowns = n + m;
  const int boundary = graph.boundary_start();

  SolveResult result;
  result.phi.resize(graph.vertices.size());
  for (int k = 0; k < c; ++k) {
    SimilarityDistribution& d = result.phi[boundary + k];
    d.p.assign(c, 0.0);
    d.p[k] = 1.0;
  }
  if (unknowns == 0) return result;

  // balance at every non-boundary vertex: (sum_j w_ij) phi_i
  // - sum_{non-boundary heads} w phi_head = sum_{boundary heads} w iota_k
  linalg::Matrix a(unknowns, unknowns);
  linalg::Matrix b(unknowns, c);
  for (const DiffusionGraph::Edge& e : graph.edges) {
    a(e.tail, e.tail) += e.weight;
    if (e.head < boundary) {
      a(e.tail, e.head) -= e.weight;
    } else {
      b(e.tail, graph.vertices[e.head].cluster) += e.weight;
    }
  }

  // equilibrate each row by its total out-weight; the system becomes the
  // mean-value form phi_i = sum (w/W) phi_head, well conditioned even when
  // absolute weights underflow toward zero
  for (int i = 0; i < unknowns; ++i) {
    const double total = a(i, i);
    if (!(total > 0.0)) {
      throw SolverError("vertex " + graph.vertices[i].id + " has no out-weight");
    }
    for (int j = 0; j < unknowns; ++j) a(i, j) /= total;
    for (int k = 0; k < c; ++k) b(i, k) /= total;
  }

  const linalg::Matrix x = linalg::solve_linear(a, b);
  for (int i = 0; i < unknowns; ++i) {
    result.phi[i].p.resize(c);
    for (int k = 0; k < c; ++k) result.phi[i].p[k] = x(i, k);
  }

  // residual of the balance equation, recomputed from the graph itself
  std::vector<double> residual(static_cast<std::size_t>(unknowns) * c, 0.0);
  for (const DiffusionGraph::Edge& e : graph.edges) {
    for (int k = 0; k < c; ++k) {
      residual[e.tail * c + k] +=
          e.weight * (result.phi[e.head].p[k] - result.phi[e.tail].p[k]);
    }
  }
  double max_residual = 0.0;
  for (double r : residual) max_residual = std::max(max_residual, std::abs(r));
  result.max_residual = max_residual;
  if (!(max_residual < 1e-8)) {
    throw SolverError("diffusion solve residual " + std::to_string(max_residual) +
                      " exceeds 1e-8");
  }
  return result;
}

}  // namespace lexidiff::diffusion
