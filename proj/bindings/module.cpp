// Python bindings for the core operations: tokenization, phonetic distances,
// the diffusion model and the reporting pipeline.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lexidiff/calibration.hpp"
#include "lexidiff/diffusion.hpp"
#include "lexidiff/io.hpp"
#include "lexidiff/ipa.hpp"
#include "lexidiff/pipeline.hpp"

namespace py = pybind11;
using namespace lexidiff;

namespace {

distance::EditWeights make_weights(double a_con, double a_vow, double w_con,
                                   double w_vow) {
  distance::EditWeights w;
  w.a_con = a_con;
  w.a_vow = a_vow;
  w.w_con = w_con;
  w.w_vow = w_vow;
  w.validate();
  return w;
}

diffusion::DiffusionParams make_params(double K, double nu0, double a_con,
                                       double a_vow, double w_con, double w_vow) {
  diffusion::DiffusionParams p;
  p.K = K;
  p.nu0 = nu0;
  p.weights = make_weights(a_con, a_vow, w_con, w_vow);
  p.validate();
  return p;
}

diffusion::GraphMode parse_mode(const std::string& mode) {
  if (mode == "directed") return diffusion::GraphMode::directed;
  if (mode == "undirected") return diffusion::GraphMode::undirected;
  throw ValidationError("mode must be 'directed' or 'undirected'");
}

py::dict report_to_dict(const pipeline::ClassificationReport& report) {
  py::dict out;
  out["clusters"] = report.cluster_names;
  py::dict per_concept;
  for (std::size_t i = 0; i < report.concepts.size(); ++i) {
    py::dict values;
    for (const auto& [language, dist] : report.per_concept[i]) {
      values[py::str(language)] = dist.p;
    }
    per_concept[py::str(report.concepts[i])] = values;
  }
  out["per_concept"] = per_concept;
  py::dict aggregate;
  for (const auto& [language, dist] : report.aggregate) {
    aggregate[py::str(language)] = dist.p;
  }
  out["aggregate"] = aggregate;
  py::list skipped;
  for (const auto& entry : report.skipped) {
    py::dict item;
    item["concept"] = entry.concept_id;
    item["language"] = entry.language;
    item["reason"] = entry.reason;
    skipped.append(item);
  }
  out["skipped"] = skipped;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "lexical similarity by graph diffusion over phonetic distances";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation",
                                            PyExc_ValueError);

  py::class_<pipeline::Dataset>(m, "Dataset")
      .def_property_readonly("concepts",
                             [](const pipeline::Dataset& d) { return d.concepts; })
      .def_property_readonly("clusters",
                             [](const pipeline::Dataset& d) {
                               std::vector<std::string> names;
                               for (const auto& c : d.clusters) names.push_back(c.name);
                               return names;
                             })
      .def_property_readonly("languages", [](const pipeline::Dataset& d) {
        std::vector<std::string> ids;
        for (const auto& info : d.languages) ids.push_back(info.id);
        return ids;
      });

  m.def("inventory_stats", []() {
    const auto& stats = ipa::PhonemeInventory::builtin().stats();
    py::dict out;
    out["consonants"] = stats.consonant_count;
    out["vowels"] = stats.vowel_count;
    out["min_consonant_distance"] = stats.min_consonant_distance;
    out["max_consonant_distance"] = stats.max_consonant_distance;
    out["min_vowel_distance"] = stats.min_vowel_distance;
    out["max_vowel_distance"] = stats.max_vowel_distance;
    return out;
  });

  m.def(
      "tokenize",
      [](const std::string& ipa_text) {
        const auto transcription = ipa::PhonemeInventory::builtin().tokenize(ipa_text);
        std::vector<std::string> symbols;
        for (const auto& p : transcription.phonemes) symbols.push_back(p.symbol);
        return symbols;
      },
      py::arg("ipa"), "segment an IPA string into inventory symbols");

  m.def(
      "phoneme_distance",
      [](const std::string& a, const std::string& b) {
        const auto& inv = ipa::PhonemeInventory::builtin();
        return ipa::phoneme_distance(inv.at(a), inv.at(b));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "substitution_weight",
      [](const std::string& a, const std::string& b, double a_con, double a_vow) {
        const auto& inv = ipa::PhonemeInventory::builtin();
        return ipa::substitution_weight(inv.at(a), inv.at(b), a_con, a_vow);
      },
      py::arg("a"), py::arg("b"), py::arg("a_con") = 0.3, py::arg("a_vow") = 0.3);

  m.def("diffusion_intensity", &diffusion::intensity, py::arg("x"), py::arg("K"),
        "1 / (1 + (e^{Kx} - 1)^2)");

  m.def(
      "word_distance",
      [](const std::string& a, const std::string& b, double a_con, double a_vow,
         double w_con, double w_vow) {
        const auto& inv = ipa::PhonemeInventory::builtin();
        return distance::word_distance(inv.tokenize(a), inv.tokenize(b),
                                       make_weights(a_con, a_vow, w_con, w_vow));
      },
      py::arg("a"), py::arg("b"), py::arg("a_con") = 0.3, py::arg("a_vow") = 0.3,
      py::arg("w_con") = 1.0, py::arg("w_vow") = 0.7,
      "weighted word distance between two IPA strings");

  m.def(
      "translation_distance",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b,
         bool reference_pair, double a_con, double a_vow, double w_con,
         double w_vow) {
        const auto& inv = ipa::PhonemeInventory::builtin();
        distance::Translation ta, tb;
        for (const auto& s : a) ta.words.push_back(inv.tokenize(s));
        for (const auto& s : b) tb.words.push_back(inv.tokenize(s));
        const auto w = make_weights(a_con, a_vow, w_con, w_vow);
        return reference_pair ? distance::translation_distance_ref(ta, tb, w)
                              : distance::translation_distance_min(ta, tb, w);
      },
      py::arg("a"), py::arg("b"), py::arg("reference_pair") = false,
      py::arg("a_con") = 0.3, py::arg("a_vow") = 0.3, py::arg("w_con") = 1.0,
      py::arg("w_vow") = 0.7,
      "synonym-aware distance between two translations (lists of IPA strings)");

  m.def(
      "load_dataset",
      [](const std::string& path) {
        return io::load_dataset(path, ipa::PhonemeInventory::builtin());
      },
      py::arg("path"));

  m.def(
      "classify",
      [](const pipeline::Dataset& dataset, double K, double nu0, double a_con,
         double a_vow, double w_con, double w_vow, const std::string& mode,
         unsigned workers) {
        const auto report = pipeline::classify(
            dataset, dataset.clusters,
            make_params(K, nu0, a_con, a_vow, w_con, w_vow), parse_mode(mode),
            workers);
        return report_to_dict(report);
      },
      py::arg("dataset"), py::arg("K") = 0.6, py::arg("nu0") = 5.0,
      py::arg("a_con") = 0.3, py::arg("a_vow") = 0.3, py::arg("w_con") = 1.0,
      py::arg("w_vow") = 0.7, py::arg("mode") = "directed",
      py::arg("workers") = 1,
      "solve every concept_id and aggregate the similarity distributions");

  m.def(
      "nmwd",
      [](const pipeline::Dataset& dataset, const std::string& language,
         std::size_t bins, double K, double a_con, double a_vow, double w_con,
         double w_vow) {
        const auto hist = pipeline::nmwd(
            dataset, language, make_params(K, 5.0, a_con, a_vow, w_con, w_vow),
            bins);
        py::dict out;
        out["bin_edges"] = hist.bin_edges;
        out["counts"] = hist.counts;
        out["normalizer"] = hist.normalizer;
        out["values"] = hist.values;
        return out;
      },
      py::arg("dataset"), py::arg("language"), py::arg("bins") = 20,
      py::arg("K") = 0.6, py::arg("a_con") = 0.3, py::arg("a_vow") = 0.3,
      py::arg("w_con") = 1.0, py::arg("w_vow") = 0.7,
      "normalized-minimal-word-distance histogram for a classified language");

  m.def(
      "pca",
      [](const pipeline::Dataset& dataset, int dims, double K, double nu0,
         double a_con, double a_vow, double w_con, double w_vow,
         const std::string& mode, unsigned workers) {
        const auto report = pipeline::classify(
            dataset, dataset.clusters,
            make_params(K, nu0, a_con, a_vow, w_con, w_vow), parse_mode(mode),
            workers);
        py::dict out;
        for (const auto& [language, coords] : pipeline::pca_project(report, dims)) {
          out[py::str(language)] = coords;
        }
        return out;
      },
      py::arg("dataset"), py::arg("dims") = 3, py::arg("K") = 0.6,
      py::arg("nu0") = 5.0, py::arg("a_con") = 0.3, py::arg("a_vow") = 0.3,
      py::arg("w_con") = 1.0, py::arg("w_vow") = 0.7, py::arg("mode") = "directed",
      py::arg("workers") = 1,
      "principal-component projection of the per-concept coordinates");

  m.def(
      "calibrate",
      [](const pipeline::Dataset& dataset, const std::string& target_cluster,
         std::string language, std::vector<std::string> concepts,
         std::vector<double> k_values, std::size_t population,
         std::size_t iterations, std::uint64_t seed) {
        calibration::CalibrationTask task;
        task.dataset = dataset;
        if (language.empty()) {
          const auto classified = dataset.classified_ids();
          if (classified.size() != 1) {
            throw ValidationError("pass language= when the dataset has " +
                                  std::to_string(classified.size()) +
                                  " classified languages");
          }
          language = classified.front();
        }
        task.classified_language = language;
        bool found = false;
        for (std::size_t k = 0; k < dataset.clusters.size(); ++k) {
          if (dataset.clusters[k].name == target_cluster) {
            task.target_cluster = k;
            found = true;
            break;
          }
        }
        if (!found) {
          throw ValidationError("unknown cluster '" + target_cluster + "'");
        }
        task.concepts = concepts.empty() ? dataset.concepts : concepts;

        py::list runs;
        double mean_con = 0.0;
        double mean_vow = 0.0;
        for (std::size_t i = 0; i < k_values.size(); ++i) {
          task.K_values = {k_values[i]};
          const auto fit =
              calibration::fit_weights(task, population, iterations, seed + i);
          py::dict run;
          run["K"] = k_values[i];
          run["w_con"] = fit.w_con;
          run["w_vow"] = fit.w_vow;
          run["objective"] = fit.objective;
          runs.append(run);
          mean_con += fit.w_con;
          mean_vow += fit.w_vow;
        }
        py::dict out;
        out["runs"] = runs;
        out["mean_w_con"] = mean_con / static_cast<double>(k_values.size());
        out["mean_w_vow"] = mean_vow / static_cast<double>(k_values.size());
        return out;
      },
      py::arg("dataset"), py::arg("target_cluster"), py::arg("language") = "",
      py::arg("concepts") = std::vector<std::string>{},
      py::arg("k_values") = std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9, 1.0},
      py::arg("population") = 30, py::arg("iterations") = 5, py::arg("seed") = 0,
      "fit (w_con, w_vow) for a classified language of known cluster");
}
