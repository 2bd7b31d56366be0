#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexidiff/diffusion.hpp"

namespace lexidiff::pipeline {

struct LanguageInfo {
  enum class Role { reference, classified };

  std::string id;
  Role role = Role::reference;
  std::string cluster;  // empty for classified languages
};

/// Concepts x languages table of translations plus cluster assignments.
/// Entries may be absent; the classification run degrades per concept.
struct Dataset {
  std::vector<std::string> concepts;
  std::vector<diffusion::ClusterSpec> clusters;  // order fixes component order
  std::vector<LanguageInfo> languages;
  // language id -> concept_id id -> translation
  std::map<std::string, std::map<std::string, distance::Translation>> translations;

  const distance::Translation* find(const std::string& language,
                                    const std::string& concept_id) const;
  const LanguageInfo* language(const std::string& id) const;
  std::vector<std::string> classified_ids() const;

  /// Role/cluster consistency, duplicate ids, non-empty clusters.
  void validate() const;
};

struct SkipEntry {
  std::string concept_id;
  std::string language;  // empty when the whole concept_id was skipped
  std::string reason;
};

struct ClassificationReport {
  std::vector<std::string> cluster_names;
  /// Concepts that were actually solved, in dataset order.
  std::vector<std::string> concepts;
  /// per_concept[i]: (language, distribution) pairs for concepts[i], in
  /// dataset language order. Hypothetical vertices are not included.
  std::vector<std::vector<std::pair<std::string, diffusion::SimilarityDistribution>>>
      per_concept;
  /// Mean distribution over the concepts where each language was solved,
  /// in dataset language order.
  std::vector<std::pair<std::string, diffusion::SimilarityDistribution>> aggregate;
  std::vector<SkipEntry> skipped;

  const diffusion::SimilarityDistribution* aggregate_for(
      const std::string& language) const;
  const diffusion::SimilarityDistribution* concept_value(
      const std::string& concept_id, const std::string& language) const;
};

/// Classifies every concept independently and averages. A reference language
/// missing a concept drops out of that concept's graph (its cluster shrinks);
/// a concept that empties a cluster is skipped; a classified language missing
/// a concept is skipped for that concept only. Per-concept solves are
/// independent and run on `workers` threads; results are assembled in concept
/// order, so the report does not depend on the worker count.
ClassificationReport classify(const Dataset& dataset,
                              const std::vector<diffusion::ClusterSpec>& clusters,
                              const diffusion::DiffusionParams& params,
                              diffusion::GraphMode mode, unsigned workers = 1);

struct NmwdHistogram {
  std::vector<double> bin_edges;       // bins + 1 ascending edges from 0
  std::vector<std::size_t> counts;     // one per bin
  double normalizer = 0.0;             // mean word length of the classified
                                       // language, in phonemes
  std::vector<double> values;          // per-concept normalized minima
};

/// Normalized minimal word distances: per concept, the minimum word distance
/// from any of the classified language's synonyms to any individual reference
/// word, divided by the classified language's mean word length in phonemes.
NmwdHistogram nmwd(const Dataset& dataset, const std::string& classified,
                   const diffusion::DiffusionParams& params, std::size_t bins);

/// Mean-centered principal component projection of the concatenated
/// per-concept coordinates (one point in R^{pc} per language). Components are
/// ordered by descending eigenvalue and signed so that the first non-zero
/// loading of each component is positive. Languages missing any solved
/// concept are left out; at least dims + 1 languages must remain.
std::vector<std::pair<std::string, std::vector<double>>> pca_project(
    const ClassificationReport& report, int dims);

}  // namespace lexidiff::pipeline
