#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "lexidiff/diffusion.hpp"

using namespace lexidiff;
using diffusion::DiffusionGraph;
using diffusion::DiffusionParams;
using diffusion::GraphMode;

namespace {

const ipa::PhonemeInventory& inv() { return ipa::PhonemeInventory::builtin(); }

distance::Translation tr(const char* word) {
  distance::Translation t;
  t.words.push_back(inv().tokenize(word));
  return t;
}

// identical translations everywhere: lambda = 0 on every edge
DiffusionGraph identical_graph(int n1, int n2, int classified, GraphMode mode,
                               const DiffusionParams& params) {
  const int n = n1 + n2;
  std::vector<int> clusters;
  for (int i = 0; i < n1; ++i) clusters.push_back(0);
  for (int i = 0; i < n2; ++i) clusters.push_back(1);
  std::vector<std::vector<double>> ref(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> cls(classified, std::vector<double>(n, 0.0));
  return diffusion::build_graph_from_distances(clusters, 2, ref, cls, params, mode);
}

double harmonicity_residual(const DiffusionGraph& g,
                            const std::vector<diffusion::SimilarityDistribution>& phi) {
  const int c = g.cluster_count;
  double worst = 0.0;
  for (int v = 0; v < g.boundary_start(); ++v) {
    std::vector<double> acc(c, 0.0);
    double total = 0.0;
    for (const auto& e : g.edges) {
      if (e.tail != v) continue;
      total += e.weight;
      for (int k = 0; k < c; ++k) acc[k] += e.weight * phi[e.head].p[k];
    }
    for (int k = 0; k < c; ++k) {
      worst = std::max(worst, std::abs(phi[v].p[k] - acc[k] / total));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("diffusion intensity") {
  for (double K : {0.3, 0.6, 1.0, 3.0}) {
    CHECK(diffusion::intensity(0.0, K) == 1.0);
  }
  // frozen against direct evaluation of 1 / (1 + (e^0.6 - 1)^2)
  const double direct = 1.0 / (1.0 + std::pow(std::exp(0.6) - 1.0, 2));
  CHECK(diffusion::intensity(1.0, 0.6) == doctest::Approx(direct).epsilon(1e-15));
  CHECK(diffusion::intensity(1.0, 0.6) ==
        doctest::Approx(0.5967016758898441).epsilon(1e-12));

  double previous = diffusion::intensity(0.0, 0.6);
  for (double x = 0.25; x <= 12.0; x += 0.25) {
    const double value = diffusion::intensity(x, 0.6);
    CHECK(value < previous);
    CHECK(value > 0.0);
    previous = value;
  }

  for (double K : {0.5, 0.6, 0.8}) {
    const double ratio =
        diffusion::intensity(50.0, K) / diffusion::intensity(51.0, K);
    CHECK(std::abs(ratio - std::exp(2.0 * K)) < 1e-6);
  }

  CHECK_THROWS_AS(diffusion::intensity(1.0, 0.0), ContractViolation);
  CHECK_THROWS_AS(diffusion::intensity(-1.0, 0.6), ContractViolation);
}

TEST_CASE("parameter validation") {
  DiffusionParams params;
  CHECK_NOTHROW(params.validate());
  params.K = 0.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
  params = DiffusionParams{};
  params.nu0 = -1.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
}

TEST_CASE("graph construction: 5 references, 2 clusters, 1 classified") {
  DiffusionParams params;
  std::vector<diffusion::LanguageTerm> terms = {
      {"v1", tr("pa")}, {"v2", tr("pa")}, {"v3", tr("pa")},
      {"v4", tr("ta")}, {"v5", tr("ta")}, {"l1", tr("ka")},
  };
  std::vector<diffusion::ClusterSpec> clusters = {{"A", {"v1", "v2", "v3"}},
                                                  {"B", {"v4", "v5"}}};
  const auto g = diffusion::build_graph(terms, clusters, {"l1"}, params,
                                        GraphMode::directed);
  CHECK(g.reference_count == 5);
  CHECK(g.classified_count == 1);
  CHECK(g.cluster_count == 2);
  CHECK(g.edges.size() == 30);
  CHECK_NOTHROW(g.validate(params));

  std::vector<int> out_degree(g.vertices.size(), 0);
  for (const auto& e : g.edges) {
    ++out_degree[e.tail];
    // no edges into the classified vertex
    CHECK(g.vertices[e.head].role != DiffusionGraph::Role::classified);
  }
  for (int i = 0; i < 5; ++i) CHECK(out_degree[i] == 5);
  CHECK(out_degree[5] == 5);
  CHECK(out_degree[6] == 0);
  CHECK(out_degree[7] == 0);

  // hypothetical edges carry weight g(0)/nu0
  for (const auto& e : g.edges) {
    if (g.vertices[e.head].role == DiffusionGraph::Role::hypothetical) {
      CHECK(e.lambda == 0.0);
      CHECK(e.weight == doctest::Approx(1.0 / params.nu0).epsilon(1e-15));
    }
  }
}

TEST_CASE("graph construction: configuration errors") {
  DiffusionParams params;
  std::vector<diffusion::LanguageTerm> terms = {{"v1", tr("pa")}, {"l1", tr("ka")}};
  CHECK_THROWS_AS(diffusion::build_graph(terms, {{"A", {"v1"}}, {"B", {"v1"}}},
                                         {"l1"}, params, GraphMode::directed),
                  ValidationError);
  CHECK_THROWS_AS(diffusion::build_graph(terms, {{"A", {"v1"}}, {"B", {}}}, {"l1"},
                                         params, GraphMode::directed),
                  ValidationError);
  CHECK_THROWS_AS(diffusion::build_graph(terms, {{"A", {"v1"}}}, {}, params,
                                         GraphMode::directed),
                  ValidationError);  // l1 has no role
  CHECK_THROWS_AS(diffusion::build_graph({{"l1", tr("ka")}}, {}, {"l1"}, params,
                                         GraphMode::directed),
                  ValidationError);  // no references at all
}

TEST_CASE("single reference, single cluster") {
  DiffusionParams params;
  const auto g = diffusion::build_graph({{"v1", tr("pa")}}, {{"A", {"v1"}}}, {},
                                        params, GraphMode::directed);
  CHECK(g.edges.size() == 1);
  const auto result = diffusion::solve(g);
  CHECK(result.phi[0].p.size() == 1);
  CHECK(result.phi[0].p[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identical translations: solution is independent of cluster sizes") {
  DiffusionParams params;  // nu0 = 5
  for (int n1 = 1; n1 <= 6; ++n1) {
    for (int n2 = 1; n2 <= 6; ++n2) {
      const auto g = identical_graph(n1, n2, 0, GraphMode::directed, params);
      const auto result = diffusion::solve(g);
      CHECK(result.max_residual <= 1e-10);
      for (int i = 0; i < n1; ++i) {
        CHECK(std::abs(result.phi[i].p[0] - 6.0 / 11.0) < 1e-9);
        CHECK(std::abs(result.phi[i].p[1] - 5.0 / 11.0) < 1e-9);
      }
      for (int i = n1; i < n1 + n2; ++i) {
        CHECK(std::abs(result.phi[i].p[0] - 5.0 / 11.0) < 1e-9);
        CHECK(std::abs(result.phi[i].p[1] - 6.0 / 11.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("undirected basic model favours the larger cluster") {
  DiffusionParams params;
  const auto g = identical_graph(1, 3, 0, GraphMode::undirected, params);
  const auto result = diffusion::solve(g);
  CHECK(std::abs(result.phi[0].p[0] - 0.4) < 1e-9);
  CHECK(std::abs(result.phi[0].p[1] - 0.6) < 1e-9);
}

TEST_CASE("simplex property and harmonicity on random graphs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lambda(0.0, 10.0);
  for (int round = 0; round < 100; ++round) {
    const int c = 1 + static_cast<int>(rng() % 4);
    const int n = c + static_cast<int>(rng() % (12 - c + 1));
    const int m = static_cast<int>(rng() % 4);
    std::vector<int> clusters(n);
    for (int k = 0; k < c; ++k) clusters[k] = k;  // every cluster inhabited
    for (int i = c; i < n; ++i) clusters[i] = static_cast<int>(rng() % c);

    std::vector<std::vector<double>> ref(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) ref[i][j] = ref[j][i] = lambda(rng);
    }
    std::vector<std::vector<double>> cls(m, std::vector<double>(n, 0.0));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) cls[i][j] = lambda(rng);
    }

    DiffusionParams params;
    params.K = 0.3 + (rng() % 10) * 0.1;
    const GraphMode mode =
        rng() % 2 == 0 ? GraphMode::directed : GraphMode::undirected;
    const auto g =
        diffusion::build_graph_from_distances(clusters, c, ref, cls, params, mode);
    CHECK_NOTHROW(g.validate(params));
    const auto result = diffusion::solve(g);
    CHECK(result.max_residual <= 1e-10);
    CHECK(harmonicity_residual(g, result.phi) <= 1e-10);
    for (const auto& phi : result.phi) {
      CHECK(phi.on_simplex(1e-9));
    }
  }
}

// Lowering the distance on one classified edge pulls the classified vertex
// toward that reference's value: the new value is a convex combination of the
// old one and phi(reference), so every component moves toward the target's.
// The target cluster's own share therefore rises whenever the target carries
// at least the classified vertex's current share of it, which is guaranteed
// for the cluster's strongest representative.
TEST_CASE("lowering a classified edge distance pulls toward that reference") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> lambda(0.0, 6.0);
  DiffusionParams params;
  for (int round = 0; round < 40; ++round) {
    const int c = 2 + static_cast<int>(rng() % 2);
    const int n = c + static_cast<int>(rng() % 4);
    std::vector<int> clusters(n);
    for (int k = 0; k < c; ++k) clusters[k] = k;
    for (int i = c; i < n; ++i) clusters[i] = static_cast<int>(rng() % c);
    std::vector<std::vector<double>> ref(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) ref[i][j] = ref[j][i] = lambda(rng);
    }
    std::vector<std::vector<double>> cls(1, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) cls[0][j] = 0.5 + lambda(rng);

    const auto before = diffusion::solve(diffusion::build_graph_from_distances(
        clusters, c, ref, cls, params, GraphMode::directed));

    // any target: each component moves toward the target reference's value
    {
      const int target = static_cast<int>(rng() % n);
      auto closer = cls;
      closer[0][target] *= 0.25;
      const auto after = diffusion::solve(diffusion::build_graph_from_distances(
          clusters, c, ref, closer, params, GraphMode::directed));
      for (int k = 0; k < c; ++k) {
        const double gap = std::abs(before.phi[n].p[k] - before.phi[target].p[k]);
        CHECK(std::abs(after.phi[n].p[k] - before.phi[n].p[k]) <= gap + 1e-12);
        CHECK(std::abs(after.phi[n].p[k] - before.phi[target].p[k]) <=
              gap + 1e-12);
      }
    }

    // strongest representative of a cluster: its share never decreases
    {
      const int k = static_cast<int>(rng() % c);
      int strongest = -1;
      for (int j = 0; j < n; ++j) {
        if (clusters[j] != k) continue;
        if (strongest < 0 ||
            before.phi[j].p[k] > before.phi[strongest].p[k]) {
          strongest = j;
        }
      }
      auto closer = cls;
      closer[0][strongest] *= 0.25;
      const auto after = diffusion::solve(diffusion::build_graph_from_distances(
          clusters, c, ref, closer, params, GraphMode::directed));
      CHECK(after.phi[n].p[k] >= before.phi[n].p[k] - 1e-12);
    }
  }
}

TEST_CASE("intensity never reaches zero and distant vertices still solve") {
  // far enough that e^{Kx} squared overflows
  const double tiny = diffusion::intensity(500.0, 3.0);
  CHECK(tiny > 0.0);

  // a classified vertex astronomically far from every reference still gets
  // the harmonic average instead of a singular system
  DiffusionParams params;
  params.K = 3.0;
  std::vector<int> clusters = {0, 1};
  std::vector<std::vector<double>> ref = {{0.0, 1.0}, {1.0, 0.0}};
  std::vector<std::vector<double>> cls = {{500.0, 500.0}};
  const auto g = diffusion::build_graph_from_distances(clusters, 2, ref, cls,
                                                       params,
                                                       GraphMode::directed);
  const auto result = diffusion::solve(g);
  CHECK(result.phi[2].on_simplex(1e-9));
  // equally far from both clusters of equal size: an even split
  CHECK(result.phi[2].p[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("graph validation rejects tampering") {
  DiffusionParams params;
  auto g = identical_graph(2, 2, 1, GraphMode::directed, params);
  CHECK_NOTHROW(g.validate(params));
  auto broken = g;
  broken.edges[0].weight *= 2.0;
  CHECK_THROWS_AS(broken.validate(params), SolverError);
  broken = g;
  broken.edges.push_back({g.boundary_start(), 0, 0.0, 1.0});
  CHECK_THROWS_AS(broken.validate(params), SolverError);
}
