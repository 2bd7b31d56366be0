#include "lexidiff/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace lexidiff::io {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

diffusion::DiffusionParams RunConfig::params() const {
  diffusion::DiffusionParams p;
  p.K = K;
  p.nu0 = nu0;
  p.weights.a_con = a_con;
  p.weights.a_vow = a_vow;
  p.weights.w_con = w_con;
  p.weights.w_vow = w_vow;
  return p;
}

std::string format_fixed(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::fixed, 6);
  return std::string(buffer, result.ptr);
}

namespace {

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char ch : value) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

std::string file_safe(const std::string& name) {
  std::string out;
  for (char ch : name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '.' || ch == '-' ||
                    ch == '_';
    out.push_back(ok ? ch : '_');
  }
  return out;
}

distance::Translation parse_translation(const ordered_json& words,
                                        const std::string& language,
                                        const std::string& concept_id,
                                        const ipa::PhonemeInventory& inventory,
                                        const std::string& origin) {
  distance::Translation translation;
  translation.language = language;
  translation.concept_id = concept_id;
  if (!words.is_array() || words.empty()) {
    throw ValidationError(origin + ": language '" + language + "', concept '" +
                          concept_id + "': expected a non-empty synonym array");
  }
  for (const auto& word : words) {
    if (!word.is_object() || !word.contains("ipa") || !word["ipa"].is_string()) {
      throw ValidationError(origin + ": language '" + language + "', concept '" +
                            concept_id + "': each synonym needs an \"ipa\" string");
    }
    try {
      translation.words.push_back(
          inventory.tokenize(word["ipa"].get<std::string>()));
    } catch (const TokenizeError& e) {
      throw ValidationError(origin + ": language '" + language + "', concept '" +
                            concept_id + "': " + e.what());
    }
  }
  return translation;
}

}  // namespace

pipeline::Dataset parse_dataset(const std::string& json_text,
                                const ipa::PhonemeInventory& inventory,
                                const std::string& origin) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }

  pipeline::Dataset dataset;
  try {
    if (!doc.is_object() || !doc.contains("concepts") ||
        !doc.contains("clusters") || !doc.contains("languages")) {
      throw ValidationError(
          origin + ": expected top-level keys concepts, clusters, languages");
    }
    for (const auto& concept_id : doc["concepts"]) {
      dataset.concepts.push_back(concept_id.get<std::string>());
    }
    for (const auto& name : doc["clusters"]) {
      dataset.clusters.push_back({name.get<std::string>(), {}});
    }

    for (const auto& lang : doc["languages"]) {
      pipeline::LanguageInfo info;
      info.id = lang.at("id").get<std::string>();
      const std::string role = lang.at("role").get<std::string>();
      if (role == "reference") {
        info.role = pipeline::LanguageInfo::Role::reference;
      } else if (role == "classified") {
        info.role = pipeline::LanguageInfo::Role::classified;
      } else {
        throw ValidationError(origin + ": language '" + info.id +
                              "': role must be reference or classified");
      }
      if (lang.contains("cluster")) {
        info.cluster = lang["cluster"].get<std::string>();
      }
      if (dataset.translations.count(info.id) != 0 ||
          std::any_of(dataset.languages.begin(), dataset.languages.end(),
                      [&](const auto& l) { return l.id == info.id; })) {
        throw ValidationError(origin + ": duplicate language id '" + info.id +
                              "'");
      }

      if (info.role == pipeline::LanguageInfo::Role::reference) {
        bool known = false;
        for (auto& cluster : dataset.clusters) {
          if (cluster.name == info.cluster) {
            cluster.members.push_back(info.id);
            known = true;
            break;
          }
        }
        if (!known) {
          throw ValidationError(origin + ": language '" + info.id +
                                "' names unknown cluster '" + info.cluster +
                                "'");
        }
      }

      if (lang.contains("translations")) {
        for (const auto& [concept_id, words] : lang["translations"].items()) {
          dataset.translations[info.id][concept_id] =
              parse_translation(words, info.id, concept_id, inventory, origin);
        }
      }
      dataset.languages.push_back(std::move(info));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }

  try {
    dataset.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  return dataset;
}

pipeline::Dataset load_dataset(const std::string& path,
                               const ipa::PhonemeInventory& inventory) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open dataset file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), inventory, path);
}

std::map<std::string, std::string> classification_outputs(
    const pipeline::Dataset& dataset, const pipeline::ClassificationReport& report,
    const RunConfig& config) {
  std::map<std::string, std::string> files;

  // per_concept.csv
  {
    std::string csv = "concept,language";
    for (const auto& name : report.cluster_names) csv += "," + csv_field(name);
    csv += "\n";
    for (std::size_t i = 0; i < report.concepts.size(); ++i) {
      for (const auto& [language, dist] : report.per_concept[i]) {
        csv += csv_field(report.concepts[i]) + "," + csv_field(language);
        for (double v : dist.p) csv += "," + format_fixed(v);
        csv += "\n";
      }
    }
    files["per_concept.csv"] = std::move(csv);
  }

  // aggregate.json
  {
    ordered_json doc;
    doc["clusters"] = report.cluster_names;
    doc["mode"] =
        config.mode == diffusion::GraphMode::directed ? "directed" : "undirected";
    doc["parameters"] = {{"K", config.K},         {"nu0", config.nu0},
                         {"a_con", config.a_con}, {"a_vow", config.a_vow},
                         {"w_con", config.w_con}, {"w_vow", config.w_vow}};
    doc["languages"] = ordered_json::array();
    for (const auto& [language, dist] : report.aggregate) {
      const pipeline::LanguageInfo* info = dataset.language(language);
      ordered_json entry;
      entry["id"] = language;
      entry["role"] = info != nullptr &&
                              info->role == pipeline::LanguageInfo::Role::classified
                          ? "classified"
                          : "reference";
      if (info != nullptr && !info->cluster.empty()) {
        entry["cluster"] = info->cluster;
      }
      std::size_t used = 0;
      for (const auto& concept_values : report.per_concept) {
        used += std::any_of(concept_values.begin(), concept_values.end(),
                            [&](const auto& kv) { return kv.first == language; })
                    ? 1
                    : 0;
      }
      entry["concepts_used"] = used;
      entry["distribution"] = dist.p;
      doc["languages"].push_back(std::move(entry));
    }
    doc["skipped"] = ordered_json::array();
    for (const auto& skip : report.skipped) {
      doc["skipped"].push_back({{"concept", skip.concept_id},
                                {"language", skip.language},
                                {"reason", skip.reason}});
    }
    files["aggregate.json"] = doc.dump(2) + "\n";
  }

  // one NMWD histogram per classified language with usable words
  for (const std::string& id : dataset.classified_ids()) {
    const auto lang_it = dataset.translations.find(id);
    if (lang_it == dataset.translations.end() || lang_it->second.empty()) continue;
    const pipeline::NmwdHistogram hist =
        pipeline::nmwd(dataset, id, config.params(), config.bins);
    files["nmwd_" + file_safe(id) + ".csv"] = nmwd_csv(hist);
  }

  // pca.csv (when enough fully classified languages exist)
  try {
    const auto projection = pca_project(report, config.pca_dims);
    std::string csv = config.pca_dims == 3 ? "language,x,y,z\n" : "language,x,y\n";
    for (const auto& [language, coords] : projection) {
      csv += csv_field(language);
      for (double v : coords) csv += "," + format_fixed(v);
      csv += "\n";
    }
    files["pca.csv"] = std::move(csv);
  } catch (const ValidationError&) {
    // too few languages for a projection: simply omit the file
  }

  return files;
}

std::string nmwd_csv(const pipeline::NmwdHistogram& histogram) {
  std::string csv = "bin_lo,bin_hi,count,normalizer\n";
  for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
    csv += format_fixed(histogram.bin_edges[i]) + "," +
           format_fixed(histogram.bin_edges[i + 1]) + "," +
           std::to_string(histogram.counts[i]) + "," +
           format_fixed(histogram.normalizer) + "\n";
  }
  return csv;
}

std::map<std::string, std::string> distance_outputs(const pipeline::Dataset& dataset,
                                                    const RunConfig& config) {
  dataset.validate();
  const distance::EditWeights weights = config.params().weights;
  std::map<std::string, std::string> files;

  for (const std::string& concept_id : dataset.concepts) {
    std::vector<const pipeline::LanguageInfo*> present;
    for (const pipeline::LanguageInfo& info : dataset.languages) {
      if (dataset.find(info.id, concept_id) != nullptr) present.push_back(&info);
    }
    if (present.empty()) continue;

    std::string csv = "language";
    for (const auto* info : present) csv += "," + csv_field(info->id);
    csv += "\n";
    for (const auto* row : present) {
      csv += csv_field(row->id);
      const distance::Translation* p = dataset.find(row->id, concept_id);
      for (const auto* col : present) {
        const distance::Translation* q = dataset.find(col->id, concept_id);
        const bool both_reference =
            row->role == pipeline::LanguageInfo::Role::reference &&
            col->role == pipeline::LanguageInfo::Role::reference;
        const double d = both_reference
                             ? distance::translation_distance_ref(*p, *q, weights)
                             : distance::translation_distance_min(*p, *q, weights);
        csv += "," + format_fixed(d);
      }
      csv += "\n";
    }
    files["distances_" + file_safe(concept_id) + ".csv"] = std::move(csv);
  }
  if (files.empty()) {
    throw ValidationError("no concept has any translations");
  }
  return files;
}

std::string calibration_json(const std::vector<double>& k_values,
                             const std::vector<calibration::FitResult>& runs) {
  ordered_json doc;
  doc["runs"] = ordered_json::array();
  double mean_con = 0.0;
  double mean_vow = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    doc["runs"].push_back({{"K", k_values[i]},
                           {"w_con", runs[i].w_con},
                           {"w_vow", runs[i].w_vow},
                           {"objective", runs[i].objective}});
    mean_con += runs[i].w_con;
    mean_vow += runs[i].w_vow;
  }
  doc["mean"] = {{"w_con", mean_con / static_cast<double>(runs.size())},
                 {"w_vow", mean_vow / static_cast<double>(runs.size())}};
  return doc.dump(2) + "\n";
}

void write_outputs(const std::string& out_dir,
                   const std::map<std::string, std::string>& files) {
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  try {
    for (const auto& [name, bytes] : files) {
      const fs::path path = fs::path(out_dir) / name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw ValidationError("cannot write '" + path.string() + "'");
      }
      written.push_back(path);
      out << bytes;
      out.flush();
      if (!out) {
        throw ValidationError("short write to '" + path.string() + "'");
      }
    }
  } catch (...) {
    // do not leave partial outputs behind
    for (const fs::path& path : written) {
      std::error_code ignored;
      fs::remove(path, ignored);
    }
    throw;
  }
}

}  // namespace lexidiff::io
