#include "lexidiff/distance.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace lexidiff::distance {

namespace {

void check_single_kind(std::span<const ipa::Phoneme> seq, const char* which) {
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i].kind() != seq[0].kind()) {
      throw ContractViolation(std::string("sequence ") + which +
                              " mixes consonants and vowels ('" +
                              seq[0].symbol + "' vs '" + seq[i].symbol + "')");
    }
  }
}

void check_non_empty(const Translation& t) {
  if (t.words.empty()) {
    throw ContractViolation("translation for '" + t.language + "'/'" +
                            t.concept_id + "' has no words");
  }
}

}  // namespace

void EditWeights::validate() const {
  if (insertion < 0 || deletion < 0 || transposition < 0 || w_con < 0 ||
      w_vow < 0) {
    throw ValidationError("edit weights must be non-negative");
  }
  if (a_con < 0 || a_con > 1 || a_vow < 0 || a_vow > 1) {
    throw ValidationError("a_con and a_vow must lie in [0,1]");
  }
}

double weighted_dl(std::span<const ipa::Phoneme> a,
                   std::span<const ipa::Phoneme> b, const EditWeights& w) {
  check_single_kind(a, "a");
  check_single_kind(b, "b");
  if (!a.empty() && !b.empty() && a[0].kind() != b[0].kind()) {
    throw ContractViolation("weighted_dl compares sequences of different kinds");
  }

  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // optimal string alignment: rows 0..n, cols 0..m
  std::vector<double> dp((n + 1) * (m + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return dp[i * (m + 1) + j];
  };

  for (std::size_t i = 1; i <= n; ++i) at(i, 0) = at(i - 1, 0) + w.deletion;
  for (std::size_t j = 1; j <= m; ++j) at(0, j) = at(0, j - 1) + w.insertion;

  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const double sub =
          ipa::same_features(a[i - 1], b[j - 1])
              ? at(i - 1, j - 1)
              : at(i - 1, j - 1) +
                    ipa::substitution_weight(a[i - 1], b[j - 1], w.a_con,
                                             w.a_vow);
      double best = std::min({at(i - 1, j) + w.deletion,
                              at(i, j - 1) + w.insertion, sub});
      if (i >= 2 && j >= 2 && ipa::same_features(a[i - 1], b[j - 2]) &&
          ipa::same_features(a[i - 2], b[j - 1])) {
        best = std::min(best, at(i - 2, j - 2) + w.transposition);
      }
      at(i, j) = best;
    }
  }
  return at(n, m);
}

double word_distance(const ipa::Transcription& p, const ipa::Transcription& q,
                     const EditWeights& w) {
  const auto p_con = p.consonants();
  const auto p_vow = p.vowels();
  const auto q_con = q.consonants();
  const auto q_vow = q.vowels();
  return w.w_con * weighted_dl(p_con, q_con, w) +
         w.w_vow * weighted_dl(p_vow, q_vow, w);
}

double translation_distance_ref(const Translation& p, const Translation& q,
                                const EditWeights& w) {
  check_non_empty(p);
  check_non_empty(q);
  const std::size_t k = p.words.size();
  const std::size_t l = q.words.size();
  std::vector<double> d0(k * l, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      d0[i * l + j] = word_distance(p.words[i], q.words[j], w);
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double row_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < l; ++j) row_min = std::min(row_min, d0[i * l + j]);
    sum += row_min;
  }
  for (std::size_t j = 0; j < l; ++j) {
    double col_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) col_min = std::min(col_min, d0[i * l + j]);
    sum += col_min;
  }
  return sum / static_cast<double>(k + l);
}

double translation_distance_min(const Translation& p, const Translation& q,
                                const EditWeights& w) {
  check_non_empty(p);
  check_non_empty(q);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pw : p.words) {
    for (const auto& qw : q.words) {
      best = std::min(best, word_distance(pw, qw, w));
    }
  }
  return best;
}

}  // namespace lexidiff::distance
