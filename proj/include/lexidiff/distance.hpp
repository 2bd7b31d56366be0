#pragma once

#include <span>
#include <string>
#include <vector>

#include "lexidiff/ipa.hpp"

namespace lexidiff::distance {

/// Costs of the elementary edits. Insertion, deletion and transposition keep
/// unit weight; substitution costs a_con/a_vow times the feature distance of
/// the substituted pair. w_con and w_vow combine the consonant- and
/// vowel-substring distances into the word distance.
struct EditWeights {
  double insertion = 1.0;
  double deletion = 1.0;
  double transposition = 1.0;
  double a_con = 0.3;
  double a_vow = 0.3;
  double w_con = 1.0;
  double w_vow = 0.7;

  void validate() const;
};

/// Weighted Damerau-Levenshtein distance in the optimal-string-alignment
/// variant (adjacent transposition, no substring edited twice). Both
/// sequences must be single-kind, and of the same kind when both are
/// non-empty; callers pass consonant-only or vowel-only substrings.
/// Symmetric, non-negative, zero on feature-identical sequences. Not a
/// metric: the triangle inequality can fail once substitution weights
/// exceed 2.
double weighted_dl(std::span<const ipa::Phoneme> a,
                   std::span<const ipa::Phoneme> b,
                   const EditWeights& w = {});

/// Word distance: w_con * dl(consonant substrings) + w_vow * dl(vowel
/// substrings).
double word_distance(const ipa::Transcription& p, const ipa::Transcription& q,
                     const EditWeights& w = {});

/// All synonyms a language uses for one concept. Never empty.
struct Translation {
  std::vector<ipa::Transcription> words;
  std::string language;
  std::string concept_id;
};

/// Distance between two reference-language translations: the mean of the
/// directed minima, (sum_i min_j d0(p_i,q_j) + sum_j min_i d0(p_i,q_j))/(k+l).
double translation_distance_ref(const Translation& p, const Translation& q,
                                const EditWeights& w = {});

/// Distance used when at most one side is a reference language: the minimum
/// pairwise word distance over the two synonym lists.
double translation_distance_min(const Translation& p, const Translation& q,
                                const EditWeights& w = {});

}  // namespace lexidiff::distance
