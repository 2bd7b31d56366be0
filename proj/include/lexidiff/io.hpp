#pragma once

#include <map>
#include <string>
#include <vector>

#include "lexidiff/calibration.hpp"
#include "lexidiff/pipeline.hpp"

namespace lexidiff::io {

/// Run parameters shared by the CLI subcommands. Defaults are the values the
/// model was tuned with.
struct RunConfig {
  double K = 0.6;
  double nu0 = 5.0;
  double a_con = 0.3;
  double a_vow = 0.3;
  double w_con = 1.0;
  double w_vow = 0.7;
  diffusion::GraphMode mode = diffusion::GraphMode::directed;
  std::size_t bins = 20;
  unsigned jobs = 0;  // 0 = hardware concurrency
  int pca_dims = 3;

  diffusion::DiffusionParams params() const;
};

/// Parses a dataset document. Every transcription is tokenized eagerly, so
/// phoneme errors surface here with language/concept/offset context.
///
/// Expected JSON shape:
///   {
///     "concepts":  ["flower", ...],
///     "clusters":  ["Slavic", ...],                     // order = component order
///     "languages": [
///       {"id": "Czech", "role": "reference", "cluster": "Slavic",
///        "translations": {"flower": [{"orthography": "květ", "ipa": "kvjɛt"}]}},
///       {"id": "Scots", "role": "classified",
///        "translations": {"flower": [{"ipa": "fluːr"}]}}
///     ]
///   }
pipeline::Dataset parse_dataset(const std::string& json_text,
                                const ipa::PhonemeInventory& inventory,
                                const std::string& origin = "<inline>");
pipeline::Dataset load_dataset(const std::string& path,
                               const ipa::PhonemeInventory& inventory);

/// Fixed 6-decimal formatting used for every CSV number, so reruns are
/// byte-identical.
std::string format_fixed(double value);

/// File contents for one classification run: per_concept.csv, aggregate.json,
/// one nmwd_<language>.csv per classified language, and pca.csv (when enough
/// languages are present). Returned as (filename, bytes) so callers can write
/// atomically; identical inputs produce identical bytes.
std::map<std::string, std::string> classification_outputs(
    const pipeline::Dataset& dataset, const pipeline::ClassificationReport& report,
    const RunConfig& config);

/// nmwd_<language>.csv body: bin_lo,bin_hi,count,normalizer rows.
std::string nmwd_csv(const pipeline::NmwdHistogram& histogram);

/// Pairwise translation-distance matrices, one distances_<concept>.csv per
/// concept. Reference-reference pairs use the mean-of-minima distance,
/// anything else the minimum rule.
std::map<std::string, std::string> distance_outputs(const pipeline::Dataset& dataset,
                                                    const RunConfig& config);

/// calibration.json body for a set of per-K fits plus their mean.
std::string calibration_json(const std::vector<double>& k_values,
                             const std::vector<calibration::FitResult>& runs);

/// Writes the given files under out_dir. On failure, files created by this
/// call are removed; nothing partial is left behind.
void write_outputs(const std::string& out_dir,
                   const std::map<std::string, std::string>& files);

}  // namespace lexidiff::io
