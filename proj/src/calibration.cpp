#include "lexidiff/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lexidiff::calibration {

void CalibrationTask::validate() const {
  dataset.validate();
  if (concepts.empty()) throw ValidationError("calibration needs concepts");
  if (K_values.empty()) throw ValidationError("calibration needs K values");
  if (target_cluster >= dataset.clusters.size()) {
    throw ValidationError("target cluster index out of range");
  }
  const pipeline::LanguageInfo* info = dataset.language(classified_language);
  if (info == nullptr ||
      info->role != pipeline::LanguageInfo::Role::classified) {
    throw ValidationError("'" + classified_language +
                          "' is not a classified language of the dataset");
  }
  for (const std::string& concept_id : concepts) {
    if (std::find(dataset.concepts.begin(), dataset.concepts.end(), concept_id) ==
        dataset.concepts.end()) {
      throw ValidationError("unknown calibration concept '" + concept_id + "'");
    }
  }
}

diffusion::SimilarityDistribution simplified_solve(
    const std::vector<std::pair<distance::Translation, int>>& pinned_references,
    int cluster_count, const distance::Translation& classified,
    const diffusion::DiffusionParams& params) {
  params.validate();
  if (pinned_references.empty()) {
    throw ValidationError("simplified solve needs at least one reference");
  }
  if (cluster_count <= 0) {
    throw ValidationError("cluster count must be positive");
  }

  // Every reference is pinned to its cluster's basis vector, so the
  // classified value is the intensity-weighted mean of basis vectors.
  std::vector<double> mass(static_cast<std::size_t>(cluster_count), 0.0);
  double total = 0.0;
  for (const auto& [translation, cluster] : pinned_references) {
    if (cluster < 0 || cluster >= cluster_count) {
      throw ValidationError("pinned reference cluster index out of range");
    }
    const double lambda =
        distance::translation_distance_min(classified, translation, params.weights);
    const double w = diffusion::intensity(lambda, params.K);
    mass[static_cast<std::size_t>(cluster)] += w;
    total += w;
  }

  diffusion::SimilarityDistribution out;
  out.p.resize(static_cast<std::size_t>(cluster_count));
  for (std::size_t k = 0; k < out.p.size(); ++k) out.p[k] = mass[k] / total;
  return out;
}

double objective(const CalibrationTask& task, double w1, double w2, double K) {
  if (w1 < 0 || w1 > 1 || w2 < 0 || w2 > 1) {
    throw ContractViolation("weights must lie in [0,1]");
  }

  diffusion::DiffusionParams params;
  params.K = K;
  params.weights.w_con = w1;
  params.weights.w_vow = w2;

  const std::size_t c = task.dataset.clusters.size();
  std::vector<double> mean(c, 0.0);
  std::size_t used = 0;
  for (const std::string& concept_id : task.concepts) {
    const distance::Translation* own =
        task.dataset.find(task.classified_language, concept_id);
    if (own == nullptr) continue;
    std::vector<std::pair<distance::Translation, int>> pinned;
    for (const pipeline::LanguageInfo& info : task.dataset.languages) {
      if (info.role != pipeline::LanguageInfo::Role::reference) continue;
      const distance::Translation* tr = task.dataset.find(info.id, concept_id);
      if (tr == nullptr) continue;
      int cluster = -1;
      for (std::size_t k = 0; k < c; ++k) {
        if (task.dataset.clusters[k].name == info.cluster) {
          cluster = static_cast<int>(k);
          break;
        }
      }
      pinned.emplace_back(*tr, cluster);
    }
    if (pinned.empty()) continue;
    const diffusion::SimilarityDistribution phi =
        simplified_solve(pinned, static_cast<int>(c), *own, params);
    for (std::size_t k = 0; k < c; ++k) mean[k] += phi.p[k];
    ++used;
  }
  if (used == 0) {
    throw ValidationError("no calibration concept has usable translations");
  }

  double norm = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    const double target = k == task.target_cluster ? 1.0 : 0.0;
    const double diff = mean[k] / static_cast<double>(used) - target;
    norm += diff * diff;
  }
  return std::sqrt(norm);
}

FitResult minimize_on_unit_square(
    const std::function<double(double, double)>& objective_fn,
    std::size_t population, std::size_t iterations, std::uint64_t seed) {
  if (population < 2) throw ValidationError("population must be at least 2");
  const auto& mean_objective = objective_fn;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  struct Member {
    double w1, w2, value;
  };
  std::vector<Member> members;
  members.reserve(population);
  for (std::size_t i = 0; i < population; ++i) {
    const double w1 = uniform(rng);
    const double w2 = uniform(rng);
    members.push_back({w1, w2, mean_objective(w1, w2)});
  }

  auto best_index = [&]() {
    std::size_t best = 0;
    for (std::size_t i = 1; i < members.size(); ++i) {
      if (members[i].value < members[best].value) best = i;
    }
    return best;
  };

  Member best = members[best_index()];

  // each member walks toward the incumbent best, sampling along an extended
  // path with per-dimension masks, and keeps its best sampled point
  const double path_length = 3.0;
  const double step = 0.15;
  const double mask_probability = 0.5;
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    const std::size_t leader = best_index();
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i == leader) continue;
      const Member origin = members[i];
      const double dx = members[leader].w1 - origin.w1;
      const double dy = members[leader].w2 - origin.w2;
      Member candidate = origin;
      for (double t = step; t <= path_length + 1e-12; t += step) {
        const double mask_x = uniform(rng) < mask_probability ? 1.0 : 0.0;
        const double mask_y = uniform(rng) < mask_probability ? 1.0 : 0.0;
        if (mask_x == 0.0 && mask_y == 0.0) continue;
        const double w1 = std::clamp(origin.w1 + t * dx * mask_x, 0.0, 1.0);
        const double w2 = std::clamp(origin.w2 + t * dy * mask_y, 0.0, 1.0);
        const double value = mean_objective(w1, w2);
        if (value < candidate.value) candidate = {w1, w2, value};
      }
      members[i] = candidate;
      if (candidate.value < best.value) best = candidate;
    }
  }

  return {best.w1, best.w2, best.value};
}

FitResult fit_weights(const CalibrationTask& task, std::size_t population,
                      std::size_t iterations, std::uint64_t seed) {
  task.validate();
  return minimize_on_unit_square(
      [&task](double w1, double w2) {
        double acc = 0.0;
        for (double K : task.K_values) acc += objective(task, w1, w2, K);
        return acc / static_cast<double>(task.K_values.size());
      },
      population, iterations, seed);
}

}  // namespace lexidiff::calibration
