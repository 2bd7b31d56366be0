#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lexidiff/errors.hpp"

namespace lexidiff::ipa {

enum class PhonemeKind { consonant, vowel };

/// Articulatory coordinates of a consonant.
///
/// zone: 0..11 over the places of articulation (bilabial, labio-dental,
/// linguo-labial, dental, alveolar, post-alveolar, retroflex, palatal, velar,
/// uvular, pharyngeal, glottal). A coarticulated consonant sits at the mean of
/// its two zones, so half-integer values occur only with coarticulated set.
/// airflow: nasal 0, plosive 4, affricate 5, fricative 6, approximant 7,
/// tap/flap 8, trill 9.
struct ConsonantFeatures {
  double zone = 0.0;
  int airflow = 4;
  bool voiced = false;
  bool lateral = false;
  bool sibilant = false;
  bool coarticulated = false;

  bool operator==(const ConsonantFeatures&) const = default;
};

/// Coordinates of a vowel on the trapezoid. zone runs from -5/3 (close front)
/// to 1 (back), openness from -1 (open) to 1 (close); the schwa sits at the
/// origin and the front edge slants, so a front vowel's zone depends on its
/// openness.
struct VowelFeatures {
  double zone = 0.0;
  double openness = 0.0;
  bool rounded = false;
  bool long_ = false;
  bool nasal = false;

  bool operator==(const VowelFeatures&) const = default;
};

struct Phoneme {
  std::string symbol;
  std::variant<ConsonantFeatures, VowelFeatures> features;

  PhonemeKind kind() const {
    return std::holds_alternative<ConsonantFeatures>(features)
               ? PhonemeKind::consonant
               : PhonemeKind::vowel;
  }
  bool is_consonant() const { return kind() == PhonemeKind::consonant; }
  bool is_vowel() const { return kind() == PhonemeKind::vowel; }

  const ConsonantFeatures& consonant() const;
  const VowelFeatures& vowel() const;
};

/// True when both phonemes have the same kind and identical feature values.
bool same_features(const Phoneme& a, const Phoneme& b);

/// L1 distance over the six consonant features. Both arguments must be
/// consonants.
double consonant_distance(const Phoneme& a, const Phoneme& b);

/// L1 distance over the five vowel features. Both arguments must be vowels.
double vowel_distance(const Phoneme& a, const Phoneme& b);

/// Feature distance for a same-kind pair (dispatches on kind).
double phoneme_distance(const Phoneme& a, const Phoneme& b);

/// Substitution weight: a_con * consonant_distance or a_vow * vowel_distance
/// depending on kind. Throws ContractViolation on a kind mismatch.
double substitution_weight(const Phoneme& a, const Phoneme& b, double a_con,
                           double a_vow);

/// One tokenized word. `phonemes` preserves input order; `source` keeps the
/// raw IPA string the transcription came from.
struct Transcription {
  std::vector<Phoneme> phonemes;
  std::string source;

  bool empty() const { return phonemes.empty(); }
  std::size_t size() const { return phonemes.size(); }

  /// Order-preserving consonant / vowel substrings.
  std::vector<Phoneme> consonants() const;
  std::vector<Phoneme> vowels() const;

  /// Canonical spelling: concatenation of the matched inventory symbols.
  std::string render() const;
};

struct InventoryStats {
  std::size_t consonant_count = 0;
  std::size_t vowel_count = 0;
  double min_consonant_distance = 0.0;  // minimum over distinct pairs
  double max_consonant_distance = 0.0;
  double min_vowel_distance = 0.0;
  double max_vowel_distance = 0.0;
};

/// The phoneme table. Immutable once constructed; all lookups are const and
/// safe to share across threads.
///
/// The data format is line-oriented, tab-separated, UTF-8:
///   line 1            "lexidiff-phonemes 1"
///   consonant rows    symbol  C  zone  airflow  voiced  lateral  sibilant  coarticulated
///   vowel rows        symbol  V  zone  openness  rounded  long  nasal
/// Numeric fields accept integers, decimals, and simple fractions ("-5/3").
/// '#' starts a comment. For every vowel listed short and oral, the long,
/// nasal and long-nasal variants are generated automatically with the length
/// mark / combining tilde appended to the symbol.
class PhonemeInventory {
 public:
  static PhonemeInventory parse(std::string_view text,
                                const std::string& origin = "<inline>");
  static PhonemeInventory load_file(const std::string& path);
  /// Inventory bundled with the library.
  static const PhonemeInventory& builtin();

  const Phoneme* find(std::string_view symbol) const;
  const Phoneme& at(std::string_view symbol) const;
  const std::vector<Phoneme>& phonemes() const { return entries_; }
  const InventoryStats& stats() const { return stats_; }

  /// Greedy longest-match segmentation of an IPA string.
  ///
  /// Length marks (ASCII ':' or U+02D0) and combining tildes fold into the
  /// preceding vowel, switching to its long / nasal variant. Stress marks,
  /// syllable dots and spaces are discarded. Anything else that does not
  /// match an inventory symbol raises TokenizeError; unknown input is never
  /// skipped.
  Transcription tokenize(std::string_view text) const;

 private:
  PhonemeInventory() = default;
  void index_entries();
  void compute_stats(const std::string& origin);

  std::vector<Phoneme> entries_;
  std::unordered_map<std::string, std::size_t> by_symbol_;
  // first codepoint -> entry indices, longest symbol (in codepoints) first
  std::unordered_map<char32_t, std::vector<std::size_t>> by_first_cp_;
  // vowel variants: (base entry index, long, nasal) -> entry index
  std::map<std::tuple<std::size_t, bool, bool>, std::size_t> vowel_variants_;
  // entry index -> base entry index (identity for base vowels / consonants)
  std::vector<std::size_t> base_of_;
  InventoryStats stats_;
};

inline Transcription tokenize(std::string_view text,
                              const PhonemeInventory& inventory) {
  return inventory.tokenize(text);
}

}  // namespace lexidiff::ipa
