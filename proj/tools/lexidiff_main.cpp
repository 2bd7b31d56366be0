// Command-line front end: dataset validation, classification, distance
// matrices, NMWD histograms, PCA projections and weight calibration.
//
// Exit codes: 0 success, 1 validation error (bad input), 2 internal error.

#include <algorithm>
#include <cctype>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexidiff/calibration.hpp"
#include "lexidiff/diffusion.hpp"
#include "lexidiff/io.hpp"
#include "lexidiff/ipa.hpp"
#include "lexidiff/pipeline.hpp"

namespace {

struct CommonOptions {
  std::string dataset_path;
  std::string inventory_path;
  std::string out_dir = ".";
  std::string mode = "directed";
  lexidiff::io::RunConfig config;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_out = true) {
  cmd->add_option("dataset", opts.dataset_path, "dataset JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--inventory", opts.inventory_path,
                  "phoneme table (default: built-in)")
      ->check(CLI::ExistingFile);
  if (with_out) {
    cmd->add_option("-o,--out", opts.out_dir, "output directory");
  }
  cmd->add_option("-K,--K", opts.config.K, "diffusion sharpness")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--nu0", opts.config.nu0, "hypothetical-edge mass")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--a-con", opts.config.a_con, "consonant substitution scale");
  cmd->add_option("--a-vow", opts.config.a_vow, "vowel substitution scale");
  cmd->add_option("--w-con", opts.config.w_con, "consonant substring weight");
  cmd->add_option("--w-vow", opts.config.w_vow, "vowel substring weight");
  cmd->add_option("--mode", opts.mode, "directed | undirected")
      ->check(CLI::IsMember({"directed", "undirected"}));
  cmd->add_option("--bins", opts.config.bins, "NMWD histogram bins")
      ->check(CLI::PositiveNumber);
  cmd->add_option("-j,--jobs", opts.config.jobs,
                  "worker threads (0 = hardware concurrency)");
  cmd->add_option("--dims", opts.config.pca_dims, "projection dimension")
      ->check(CLI::IsMember({2, 3}));
}

const lexidiff::ipa::PhonemeInventory& inventory_for(
    const CommonOptions& opts,
    std::optional<lexidiff::ipa::PhonemeInventory>& storage) {
  if (opts.inventory_path.empty()) {
    return lexidiff::ipa::PhonemeInventory::builtin();
  }
  storage = lexidiff::ipa::PhonemeInventory::load_file(opts.inventory_path);
  return *storage;
}

lexidiff::diffusion::GraphMode graph_mode(const CommonOptions& opts) {
  return opts.mode == "undirected" ? lexidiff::diffusion::GraphMode::undirected
                                   : lexidiff::diffusion::GraphMode::directed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexical similarity by graph diffusion over phonetic distances"};
  app.require_subcommand(1);

  CommonOptions classify_opts, distances_opts, nmwd_opts, pca_opts,
      calibrate_opts, validate_opts;

  CLI::App* cmd_classify = app.add_subcommand(
      "classify", "solve all concepts and write per-concept, aggregate, NMWD "
                  "and PCA reports");
  add_common(cmd_classify, classify_opts);

  CLI::App* cmd_distances = app.add_subcommand(
      "distances", "write the pairwise translation-distance matrix per concept");
  add_common(cmd_distances, distances_opts);

  std::string nmwd_language;
  CLI::App* cmd_nmwd =
      app.add_subcommand("nmwd", "write normalized-minimal-word-distance "
                                 "histograms for classified languages");
  add_common(cmd_nmwd, nmwd_opts);
  cmd_nmwd->add_option("--language", nmwd_language,
                       "classified language (default: all)");

  CLI::App* cmd_pca = app.add_subcommand(
      "pca", "write the principal-component projection of per-concept coordinates");
  add_common(cmd_pca, pca_opts);

  std::string target_cluster, calibrate_language;
  std::vector<std::string> calibrate_concepts;
  std::vector<double> k_values{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t population = 30;
  std::size_t iterations = 5;
  std::uint64_t seed = 0;
  CLI::App* cmd_calibrate = app.add_subcommand(
      "calibrate", "fit (w_con, w_vow) for a classified language of known cluster");
  add_common(cmd_calibrate, calibrate_opts);
  cmd_calibrate
      ->add_option("--target-cluster", target_cluster,
                   "cluster the classified language belongs to")
      ->required();
  cmd_calibrate->add_option("--language", calibrate_language,
                            "classified language (default: the only one)");
  cmd_calibrate->add_option("--concepts", calibrate_concepts,
                            "concept subset (default: all)");
  cmd_calibrate->add_option("--k-values", k_values, "K values, one fit per value");
  cmd_calibrate->add_option("--population", population, "search population size");
  cmd_calibrate->add_option("--iterations", iterations, "search iterations");
  cmd_calibrate->add_option("--seed", seed, "random seed");

  CLI::App* cmd_validate =
      app.add_subcommand("validate", "check a dataset file and report");
  add_common(cmd_validate, validate_opts, /*with_out=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<lexidiff::ipa::PhonemeInventory> storage;

    if (cmd_classify->parsed()) {
      auto& opts = classify_opts;
      const auto& inventory = inventory_for(opts, storage);
      const auto dataset = lexidiff::io::load_dataset(opts.dataset_path, inventory);
      const auto report =
          lexidiff::pipeline::classify(dataset, dataset.clusters,
                                       opts.config.params(), graph_mode(opts),
                                       opts.config.jobs);
      opts.config.mode = graph_mode(opts);
      lexidiff::io::write_outputs(
          opts.out_dir,
          lexidiff::io::classification_outputs(dataset, report, opts.config));
      std::cout << "classified " << report.concepts.size() << " concept(s), "
                << report.aggregate.size() << " language(s) -> " << opts.out_dir
                << "\n";
    } else if (cmd_distances->parsed()) {
      auto& opts = distances_opts;
      const auto& inventory = inventory_for(opts, storage);
      const auto dataset = lexidiff::io::load_dataset(opts.dataset_path, inventory);
      const auto files = lexidiff::io::distance_outputs(dataset, opts.config);
      lexidiff::io::write_outputs(opts.out_dir, files);
      std::cout << "wrote " << files.size() << " distance matrix file(s) -> "
                << opts.out_dir << "\n";
    } else if (cmd_nmwd->parsed()) {
      auto& opts = nmwd_opts;
      const auto& inventory = inventory_for(opts, storage);
      const auto dataset = lexidiff::io::load_dataset(opts.dataset_path, inventory);
      std::vector<std::string> targets;
      if (!nmwd_language.empty()) {
        targets.push_back(nmwd_language);
      } else {
        targets = dataset.classified_ids();
      }
      if (targets.empty()) {
        throw lexidiff::ValidationError("dataset has no classified languages");
      }
      std::map<std::string, std::string> files;
      for (const std::string& id : targets) {
        const auto hist =
            lexidiff::pipeline::nmwd(dataset, id, opts.config.params(),
                                     opts.config.bins);
        std::string safe;
        for (char ch : id) safe += (std::isalnum(static_cast<unsigned char>(ch)) ||
                                    ch == '-' || ch == '_' || ch == '.')
                                       ? ch
                                       : '_';
        files["nmwd_" + safe + ".csv"] = lexidiff::io::nmwd_csv(hist);
      }
      lexidiff::io::write_outputs(opts.out_dir, files);
      std::cout << "wrote " << files.size() << " NMWD histogram(s) -> "
                << opts.out_dir << "\n";
    } else if (cmd_pca->parsed()) {
      auto& opts = pca_opts;
      const auto& inventory = inventory_for(opts, storage);
      const auto dataset = lexidiff::io::load_dataset(opts.dataset_path, inventory);
      const auto report =
          lexidiff::pipeline::classify(dataset, dataset.clusters,
                                       opts.config.params(), graph_mode(opts),
                                       opts.config.jobs);
      const auto projection =
          lexidiff::pipeline::pca_project(report, opts.config.pca_dims);
      std::string csv =
          opts.config.pca_dims == 3 ? "language,x,y,z\n" : "language,x,y\n";
      for (const auto& [language, coords] : projection) {
        csv += language;
        for (double v : coords) csv += "," + lexidiff::io::format_fixed(v);
        csv += "\n";
      }
      lexidiff::io::write_outputs(opts.out_dir, {{"pca.csv", csv}});
      std::cout << "wrote pca.csv (" << projection.size() << " languages) -> "
                << opts.out_dir << "\n";
    } else if (cmd_calibrate->parsed()) {
      auto& opts = calibrate_opts;
      const auto& inventory = inventory_for(opts, storage);
      const auto dataset = lexidiff::io::load_dataset(opts.dataset_path, inventory);

      lexidiff::calibration::CalibrationTask task;
      task.dataset = dataset;
      if (!calibrate_language.empty()) {
        task.classified_language = calibrate_language;
      } else {
        const auto classified = dataset.classified_ids();
        if (classified.size() != 1) {
          throw lexidiff::ValidationError(
              "dataset has " + std::to_string(classified.size()) +
              " classified languages; pick one with --language");
        }
        task.classified_language = classified.front();
      }
      const auto cluster_it =
          std::find_if(dataset.clusters.begin(), dataset.clusters.end(),
                       [&](const auto& c) { return c.name == target_cluster; });
      if (cluster_it == dataset.clusters.end()) {
        throw lexidiff::ValidationError("unknown cluster '" + target_cluster + "'");
      }
      task.target_cluster =
          static_cast<std::size_t>(cluster_it - dataset.clusters.begin());
      task.concepts =
          calibrate_concepts.empty() ? dataset.concepts : calibrate_concepts;

      std::vector<lexidiff::calibration::FitResult> runs;
      for (std::size_t i = 0; i < k_values.size(); ++i) {
        task.K_values = {k_values[i]};
        runs.push_back(lexidiff::calibration::fit_weights(task, population,
                                                          iterations, seed + i));
      }
      lexidiff::io::write_outputs(
          opts.out_dir,
          {{"calibration.json", lexidiff::io::calibration_json(k_values, runs)}});
      double mean_con = 0.0;
      double mean_vow = 0.0;
      for (const auto& run : runs) {
        mean_con += run.w_con;
        mean_vow += run.w_vow;
      }
      std::cout << "mean over " << runs.size()
                << " run(s): w_con=" << mean_con / runs.size()
                << " w_vow=" << mean_vow / runs.size() << " -> " << opts.out_dir
                << "/calibration.json\n";
    } else if (cmd_validate->parsed()) {
      auto& opts = validate_opts;
      const auto& inventory = inventory_for(opts, storage);
      const auto dataset = lexidiff::io::load_dataset(opts.dataset_path, inventory);
      std::size_t translation_count = 0;
      for (const auto& [lang, by_concept] : dataset.translations) {
        translation_count += by_concept.size();
      }
      std::cout << "ok: " << dataset.languages.size() << " languages, "
                << dataset.clusters.size() << " clusters, "
                << dataset.concepts.size() << " concepts, " << translation_count
                << " translations\n";
    }
  } catch (const lexidiff::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
