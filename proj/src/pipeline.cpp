#include "lexidiff/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <cmath>
#include <set>
#include <thread>

#include "lexidiff/linalg.hpp"

namespace lexidiff::pipeline {

const distance::Translation* Dataset::find(const std::string& language,
                                           const std::string& concept_id) const {
  const auto lang_it = translations.find(language);
  if (lang_it == translations.end()) return nullptr;
  const auto concept_it = lang_it->second.find(concept_id);
  if (concept_it == lang_it->second.end()) return nullptr;
  return &concept_it->second;
}

const LanguageInfo* Dataset::language(const std::string& id) const {
  for (const LanguageInfo& info : languages) {
    if (info.id == id) return &info;
  }
  return nullptr;
}

std::vector<std::string> Dataset::classified_ids() const {
  std::vector<std::string> out;
  for (const LanguageInfo& info : languages) {
    if (info.role == LanguageInfo::Role::classified) out.push_back(info.id);
  }
  return out;
}

void Dataset::validate() const {
  std::set<std::string> cluster_names;
  for (const auto& cluster : clusters) {
    if (!cluster_names.insert(cluster.name).second) {
      throw ValidationError("duplicate cluster '" + cluster.name + "'");
    }
  }
  std::set<std::string> ids;
  for (const LanguageInfo& info : languages) {
    if (!ids.insert(info.id).second) {
      throw ValidationError("duplicate language id '" + info.id + "'");
    }
    if (info.role == LanguageInfo::Role::reference) {
      if (info.cluster.empty()) {
        throw ValidationError("reference language '" + info.id +
                              "' has no cluster");
      }
      if (cluster_names.count(info.cluster) == 0) {
        throw ValidationError("language '" + info.id +
                              "' names unknown cluster '" + info.cluster + "'");
      }
    } else if (!info.cluster.empty()) {
      throw ValidationError("classified language '" + info.id +
                            "' must not carry a cluster");
    }
  }
  for (const auto& cluster : clusters) {
    bool inhabited = false;
    for (const LanguageInfo& info : languages) {
      if (info.role == LanguageInfo::Role::reference &&
          info.cluster == cluster.name) {
        inhabited = true;
        break;
      }
    }
    if (!inhabited) {
      throw ValidationError("cluster '" + cluster.name + "' has no languages");
    }
  }
  for (const auto& [lang, by_concept] : translations) {
    if (language(lang) == nullptr) {
      throw ValidationError("translations listed for unknown language '" +
                            lang + "'");
    }
    for (const auto& [concept_id, tr] : by_concept) {
      if (std::find(concepts.begin(), concepts.end(), concept_id) ==
          concepts.end()) {
        throw ValidationError("language '" + lang +
                              "' has a translation for unknown concept '" +
                              concept_id + "'");
      }
      if (tr.words.empty()) {
        throw ValidationError("language '" + lang + "', concept '" + concept_id +
                              "': empty synonym list");
      }
    }
  }
}

const diffusion::SimilarityDistribution* ClassificationReport::aggregate_for(
    const std::string& language) const {
  for (const auto& [id, dist] : aggregate) {
    if (id == language) return &dist;
  }
  return nullptr;
}

const diffusion::SimilarityDistribution* ClassificationReport::concept_value(
    const std::string& concept_id, const std::string& language) const {
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    if (concepts[i] != concept_id) continue;
    for (const auto& [id, dist] : per_concept[i]) {
      if (id == language) return &dist;
    }
  }
  return nullptr;
}

namespace {

struct ConceptOutcome {
  bool solved = false;
  std::vector<std::pair<std::string, diffusion::SimilarityDistribution>> values;
  std::vector<SkipEntry> skipped;
};

ConceptOutcome classify_concept(const Dataset& dataset,
                                const std::vector<diffusion::ClusterSpec>& clusters,
                                const std::string& concept_id,
                                const diffusion::DiffusionParams& params,
                                diffusion::GraphMode mode) {
  ConceptOutcome outcome;

  std::vector<diffusion::LanguageTerm> terms;
  std::vector<diffusion::ClusterSpec> present_clusters(clusters.size());
  std::vector<std::string> present_classified;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    present_clusters[k].name = clusters[k].name;
  }

  for (const LanguageInfo& info : dataset.languages) {
    const distance::Translation* tr = dataset.find(info.id, concept_id);
    if (tr == nullptr) {
      outcome.skipped.push_back({concept_id, info.id, "missing translation"});
      continue;
    }
    if (info.role == LanguageInfo::Role::reference) {
      for (std::size_t k = 0; k < clusters.size(); ++k) {
        if (clusters[k].name == info.cluster) {
          present_clusters[k].members.push_back(info.id);
          break;
        }
      }
    } else {
      present_classified.push_back(info.id);
    }
    terms.push_back({info.id, *tr});
  }

  for (const auto& cluster : present_clusters) {
    if (cluster.members.empty()) {
      outcome.skipped.push_back(
          {concept_id, "", "cluster '" + cluster.name + "' has no translations"});
      return outcome;
    }
  }

  const diffusion::DiffusionGraph graph =
      diffusion::build_graph(terms, present_clusters, present_classified, params, mode);
  const diffusion::SolveResult solved = diffusion::solve(graph);

  for (int i = 0; i < graph.boundary_start(); ++i) {
    outcome.values.emplace_back(graph.vertices[i].id, solved.phi[i]);
  }
  // report rows follow dataset language order
  std::sort(outcome.values.begin(), outcome.values.end(),
            [&](const auto& a, const auto& b) {
              auto pos = [&](const std::string& id) {
                for (std::size_t i = 0; i < dataset.languages.size(); ++i) {
                  if (dataset.languages[i].id == id) return i;
                }
                return dataset.languages.size();
              };
              return pos(a.first) < pos(b.first);
            });
  outcome.solved = true;
  return outcome;
}

}  // namespace

ClassificationReport classify(const Dataset& dataset,
                              const std::vector<diffusion::ClusterSpec>& clusters,
                              const diffusion::DiffusionParams& params,
                              diffusion::GraphMode mode, unsigned workers) {
  dataset.validate();
  params.validate();
  if (dataset.concepts.empty()) {
    throw ValidationError("dataset has no concepts");
  }

  std::vector<ConceptOutcome> outcomes(dataset.concepts.size());
  const std::size_t task_count = dataset.concepts.size();
  unsigned thread_count = workers == 0 ? std::thread::hardware_concurrency() : workers;
  thread_count = std::max(1u, std::min<unsigned>(thread_count, task_count));

  if (thread_count <= 1) {
    for (std::size_t i = 0; i < task_count; ++i) {
      outcomes[i] =
          classify_concept(dataset, clusters, dataset.concepts[i], params, mode);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= task_count) break;
        try {
          outcomes[i] = classify_concept(dataset, clusters, dataset.concepts[i],
                                         params, mode);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  ClassificationReport report;
  for (const auto& cluster : clusters) report.cluster_names.push_back(cluster.name);

  for (std::size_t i = 0; i < task_count; ++i) {
    for (const SkipEntry& s : outcomes[i].skipped) report.skipped.push_back(s);
    if (!outcomes[i].solved) continue;
    report.concepts.push_back(dataset.concepts[i]);
    report.per_concept.push_back(std::move(outcomes[i].values));
  }
  if (report.concepts.empty()) {
    throw ValidationError("no concept could be classified");
  }

  // unweighted mean over the concepts where each language was solved
  const std::size_t c = clusters.size();
  for (const LanguageInfo& info : dataset.languages) {
    std::vector<double> sum(c, 0.0);
    std::size_t used = 0;
    for (const auto& concept_values : report.per_concept) {
      for (const auto& [id, dist] : concept_values) {
        if (id != info.id) continue;
        for (std::size_t k = 0; k < c; ++k) sum[k] += dist.p[k];
        ++used;
        break;
      }
    }
    if (used == 0) continue;
    diffusion::SimilarityDistribution mean;
    mean.p.resize(c);
    for (std::size_t k = 0; k < c; ++k) {
      mean.p[k] = sum[k] / static_cast<double>(used);
    }
    report.aggregate.emplace_back(info.id, std::move(mean));
  }
  return report;
}

NmwdHistogram nmwd(const Dataset& dataset, const std::string& classified,
                   const diffusion::DiffusionParams& params, std::size_t bins) {
  dataset.validate();
  params.validate();
  if (bins == 0) throw ValidationError("bin count must be positive");
  const LanguageInfo* info = dataset.language(classified);
  if (info == nullptr) {
    throw ValidationError("unknown language '" + classified + "'");
  }

  // normalizer: mean phoneme count over every word of the classified language
  std::size_t word_count = 0;
  std::size_t phoneme_count = 0;
  const auto lang_it = dataset.translations.find(classified);
  if (lang_it != dataset.translations.end()) {
    for (const auto& [concept_id, tr] : lang_it->second) {
      for (const auto& word : tr.words) {
        ++word_count;
        phoneme_count += word.size();
      }
    }
  }
  if (word_count == 0) {
    throw ValidationError("language '" + classified + "' has no words");
  }
  const double normalizer =
      static_cast<double>(phoneme_count) / static_cast<double>(word_count);
  if (normalizer <= 0.0) {
    throw ValidationError("language '" + classified +
                          "' has only empty words; normalizer is zero");
  }

  NmwdHistogram hist;
  hist.normalizer = normalizer;
  for (const std::string& concept_id : dataset.concepts) {
    const distance::Translation* own = dataset.find(classified, concept_id);
    if (own == nullptr) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const LanguageInfo& other : dataset.languages) {
      if (other.role != LanguageInfo::Role::reference) continue;
      const distance::Translation* tr = dataset.find(other.id, concept_id);
      if (tr == nullptr) continue;
      for (const auto& own_word : own->words) {
        for (const auto& ref_word : tr->words) {
          best = std::min(best,
                          distance::word_distance(own_word, ref_word, params.weights));
        }
      }
    }
    if (std::isinf(best)) continue;  // no reference words for this concept_id
    hist.values.push_back(best / normalizer);
  }
  if (hist.values.empty()) {
    throw ValidationError("no concepts with both '" + classified +
                          "' and reference translations");
  }

  const double max_value = *std::max_element(hist.values.begin(), hist.values.end());
  const double upper = max_value > 0.0 ? max_value : 1.0;
  hist.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    hist.bin_edges[i] = upper * static_cast<double>(i) / static_cast<double>(bins);
  }
  hist.counts.assign(bins, 0);
  for (double v : hist.values) {
    auto bin = static_cast<std::size_t>(v / upper * static_cast<double>(bins));
    if (bin >= bins) bin = bins - 1;  // the maximum lands in the last bin
    ++hist.counts[bin];
  }
  return hist;
}

std::vector<std::pair<std::string, std::vector<double>>> pca_project(
    const ClassificationReport& report, int dims) {
  if (dims != 2 && dims != 3) {
    throw ValidationError("projection dimension must be 2 or 3");
  }

  // languages present in every solved concept_id, in report order
  std::vector<std::string> languages;
  for (const auto& [id, dist] : report.aggregate) {
    (void)dist;
    bool everywhere = true;
    for (const auto& concept_values : report.per_concept) {
      const bool here =
          std::any_of(concept_values.begin(), concept_values.end(),
                      [&](const auto& kv) { return kv.first == id; });
      if (!here) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) languages.push_back(id);
  }

  const std::size_t rows = languages.size();
  if (rows < static_cast<std::size_t>(dims) + 1) {
    throw ValidationError("projection needs at least " +
                          std::to_string(dims + 1) + " fully classified languages");
  }
  const std::size_t c = report.cluster_names.size();
  const std::size_t dim = report.per_concept.size() * c;

  linalg::Matrix coords(rows, dim);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t col = 0;
    for (const auto& concept_values : report.per_concept) {
      for (const auto& [id, dist] : concept_values) {
        if (id != languages[r]) continue;
        for (std::size_t k = 0; k < c; ++k) coords(r, col + k) = dist.p[k];
        break;
      }
      col += c;
    }
  }

  // center columns
  for (std::size_t j = 0; j < dim; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += coords(r, j);
    mean /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) coords(r, j) -= mean;
  }

  // eigendecomposition of the Gram matrix; projection column k is u_k * s_k
  linalg::Matrix gram(rows, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = i; j < rows; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) acc += coords(i, d) * coords(j, d);
      gram(i, j) = acc;
      gram(j, i) = acc;
    }
  }
  const linalg::EigenDecomposition eig = linalg::symmetric_eigen(gram);

  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (const std::string& id : languages) {
    out.emplace_back(id, std::vector<double>(static_cast<std::size_t>(dims), 0.0));
  }
  for (int k = 0; k < dims; ++k) {
    const double value = k < static_cast<int>(eig.values.size()) ? eig.values[k] : 0.0;
    if (value <= 1e-12) continue;  // direction with no variance projects to 0
    const double sigma = std::sqrt(value);
    // loading = X^T u / sigma; flip so its first non-zero entry is positive
    double first_loading = 0.0;
    for (std::size_t d = 0; d < dim && std::abs(first_loading) <= 1e-9; ++d) {
      double acc = 0.0;
      for (std::size_t r = 0; r < rows; ++r) acc += coords(r, d) * eig.vectors(r, k);
      first_loading = acc / sigma;
    }
    const double sign = first_loading < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < rows; ++r) {
      out[r].second[k] = sign * sigma * eig.vectors(r, k);
    }
  }
  return out;
}

}  // namespace lexidiff::pipeline
