#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lexidiff/pipeline.hpp"

namespace lexidiff::calibration {

/// Inputs of one weight-fitting run: reference clusters plus one classified
/// language that is known to belong to cluster `target_cluster`.
struct CalibrationTask {
  pipeline::Dataset dataset;
  std::string classified_language;
  std::size_t target_cluster = 0;
  std::vector<std::string> concepts;  // subset of dataset.concepts to use
  std::vector<double> K_values;       // objective is averaged over these

  void validate() const;
};

/// Fully pinned model: every reference vertex is fixed to its cluster's basis
/// vector, so the classified vertex's value is a single weighted average of
/// basis vectors with weights intensity(lambda_j). No linear system involved;
/// the result is an exact convex combination.
diffusion::SimilarityDistribution simplified_solve(
    const std::vector<std::pair<distance::Translation, int>>& pinned_references,
    int cluster_count, const distance::Translation& classified,
    const diffusion::DiffusionParams& params);

/// Euclidean norm of (mean simplified-solve distribution over the task's
/// concepts) minus the target cluster's basis vector, evaluated with
/// consonant/vowel weights (w1, w2) and diffusion sharpness K.
double objective(const CalibrationTask& task, double w1, double w2, double K);

struct FitResult {
  double w_con = 0.0;
  double w_vow = 0.0;
  double objective = 0.0;
};

/// Population search over [0,1]^2: members take directional steps toward the
/// incumbent best with randomized per-dimension masks. Deterministic for a
/// fixed seed, and never worse than the best initial member.
FitResult minimize_on_unit_square(
    const std::function<double(double, double)>& objective,
    std::size_t population, std::size_t iterations, std::uint64_t seed);

/// Fits (w_con, w_vow) by minimizing the mean of `objective` over
/// task.K_values.
FitResult fit_weights(const CalibrationTask& task, std::size_t population,
                      std::size_t iterations, std::uint64_t seed);

}  // namespace lexidiff::calibration
