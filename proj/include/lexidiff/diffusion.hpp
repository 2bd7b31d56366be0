#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lexidiff/distance.hpp"

namespace lexidiff::diffusion {

/// Diffusion intensity 1 / (1 + (e^{Kx} - 1)^2): positive, strictly
/// decreasing, g(0) = 1, and g(x)/g(x+1) -> e^{2K} for large x.
double intensity(double x, double K);

enum class GraphMode { directed, undirected };

/// One reference cluster: a named, non-empty set of reference languages.
struct ClusterSpec {
  std::string name;
  std::vector<std::string> members;
};

struct DiffusionParams {
  double K = 0.6;
  double nu0 = 5.0;  // mass of the edge into a hypothetical vertex
  distance::EditWeights weights{};

  void validate() const;
};

/// A point on the probability simplex: per-cluster similarity of one vertex.
struct SimilarityDistribution {
  std::vector<double> p;

  std::size_t size() const { return p.size(); }
  double operator[](std::size_t i) const { return p[i]; }
  bool on_simplex(double tol = 1e-9) const;
};

/// Per-concept graph over reference, classified and hypothetical vertices.
///
/// Directed mode: reference vertices point at every other reference and at
/// their own hypothetical vertex; classified vertices point at every
/// reference; hypothetical vertices are boundary and have no outgoing edges.
/// Edge weight is intensity(lambda) / nu(head), where nu is the head's
/// cluster size for reference heads and nu0 for hypothetical heads.
/// Undirected mode keeps unit nu and symmetric weights intensity(lambda),
/// emitting both orientations of every connection (including into classified
/// vertices).
struct DiffusionGraph {
  enum class Role { reference, classified, hypothetical };

  struct Vertex {
    std::string id;
    Role role;
    int cluster = -1;  // reference/hypothetical: cluster index; classified: -1
  };

  struct Edge {
    int tail = 0;
    int head = 0;
    double lambda = 0.0;
    double weight = 0.0;
  };

  // Order: references, classified, hypotheticals.
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<std::string> cluster_names;
  int reference_count = 0;
  int classified_count = 0;
  int cluster_count = 0;
  GraphMode mode = GraphMode::directed;

  int boundary_start() const { return reference_count + classified_count; }

  /// Structural invariants (degrees, weight formula, no stray edges).
  /// Throws SolverError on violation.
  void validate(const DiffusionParams& params) const;
};

struct LanguageTerm {
  std::string language;
  distance::Translation translation;
};

/// Builds the per-concept graph from translations. Every language in `terms`
/// must be either a member of exactly one cluster or listed in `classified`.
/// Reference-reference distances use translation_distance_ref,
/// classified-reference edges use translation_distance_min, and edges into a
/// hypothetical vertex carry lambda = 0.
DiffusionGraph build_graph(const std::vector<LanguageTerm>& terms,
                           const std::vector<ClusterSpec>& clusters,
                           const std::vector<std::string>& classified,
                           const DiffusionParams& params, GraphMode mode);

/// Same construction from precomputed distances: reference_cluster[i] is the
/// cluster index of reference i, ref_lambda is the symmetric n-by-n distance
/// table, classified_lambda is m-by-n. Useful for synthetic graphs and tests.
DiffusionGraph build_graph_from_distances(
    const std::vector<int>& reference_cluster, int cluster_count,
    const std::vector<std::vector<double>>& ref_lambda,
    const std::vector<std::vector<double>>& classified_lambda,
    const DiffusionParams& params, GraphMode mode);

struct SolveResult {
  /// Aligned with graph.vertices; hypothetical vertices carry their pinned
  /// basis vectors.
  std::vector<SimilarityDistribution> phi;
  /// Largest per-row, per-component residual of the balance equation.
  double max_residual = 0.0;
};

/// Solves the stationary diffusion system: at every non-boundary vertex the
/// value equals the weight-averaged value of its out-neighbours, with the
/// hypothetical vertex of cluster k pinned to basis vector k. One LU
/// factorization serves the c right-hand sides.
SolveResult solve(const DiffusionGraph& graph);

}  // namespace lexidiff::diffusion
