#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "lexidiff/ipa.hpp"

using namespace lexidiff;
using ipa::PhonemeInventory;

namespace {
const PhonemeInventory& inv() { return PhonemeInventory::builtin(); }

std::vector<std::string> symbols(const ipa::Transcription& t) {
  std::vector<std::string> out;
  for (const auto& p : t.phonemes) out.push_back(p.symbol);
  return out;
}

template <typename Fn>
bool fails_mentioning(Fn&& fn, const std::string& needle) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}
}  // namespace

TEST_CASE("builtin inventory size and stats") {
  const auto& stats = inv().stats();
  CHECK(stats.consonant_count >= 100);
  CHECK(stats.vowel_count >= 30);
  CHECK(stats.min_consonant_distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stats.min_vowel_distance == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(stats.max_vowel_distance == doctest::Approx(23.0 / 3.0).epsilon(1e-12));
  // characterization of the bundled table
  CHECK(stats.max_consonant_distance == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("feature distances from the bundled table") {
  CHECK(ipa::consonant_distance(inv().at("p"), inv().at("p")) == 0.0);
  CHECK(ipa::consonant_distance(inv().at("p"), inv().at("b")) == 1.0);
  CHECK(ipa::consonant_distance(inv().at("t"), inv().at("s")) == 3.0);
  CHECK(ipa::vowel_distance(inv().at("i"), inv().at("i")) == 0.0);
  CHECK(ipa::vowel_distance(inv().at("i"), inv().at("y")) == 1.0);
  CHECK(ipa::vowel_distance(inv().at("a"), inv().at("ã")) == 1.0);

  CHECK_THROWS_AS(ipa::consonant_distance(inv().at("p"), inv().at("a")),
                  ContractViolation);
  CHECK_THROWS_AS(ipa::vowel_distance(inv().at("a"), inv().at("p")),
                  ContractViolation);
  CHECK_THROWS_AS(ipa::substitution_weight(inv().at("p"), inv().at("a"), 0.3, 0.3),
                  ContractViolation);
}

TEST_CASE("substitution weights with a = 0.3") {
  CHECK(ipa::substitution_weight(inv().at("p"), inv().at("b"), 0.3, 0.3) == 0.3);
  CHECK(ipa::substitution_weight(inv().at("p"), inv().at("p"), 0.3, 0.3) == 0.0);
  // the most distant vowel pair: short oral close front vs long nasal open
  // back rounded
  const double top =
      ipa::substitution_weight(inv().at("i"), inv().at("ɒ̃ː"), 0.3, 0.3);
  CHECK(top == doctest::Approx(2.3).epsilon(1e-12));
}

TEST_CASE("distance properties over every inventory pair") {
  std::vector<const ipa::Phoneme*> consonants, vowels;
  for (const auto& p : inv().phonemes()) {
    (p.is_consonant() ? consonants : vowels).push_back(&p);
  }

  double min_con = 1e300, min_vow = 1e300, max_vow = 0.0;
  for (const auto* group : {&consonants, &vowels}) {
    for (std::size_t i = 0; i < group->size(); ++i) {
      for (std::size_t j = i; j < group->size(); ++j) {
        const auto& a = *(*group)[i];
        const auto& b = *(*group)[j];
        const double d = ipa::phoneme_distance(a, b);
        const double r = ipa::phoneme_distance(b, a);
        CHECK(d == r);
        CHECK(d >= 0.0);
        CHECK((d == 0.0) == ipa::same_features(a, b));
        if (i != j && group == &consonants) min_con = std::min(min_con, d);
        if (i != j && group == &vowels) {
          min_vow = std::min(min_vow, d);
          max_vow = std::max(max_vow, d);
        }
      }
    }
  }
  // every consonant substitution weight at a_con = 0.3 is >= 0.3, minimum
  // attained exactly
  CHECK(0.3 * min_con == 0.3);
  CHECK(0.3 * min_vow == doctest::Approx(0.075).epsilon(1e-12));
  CHECK(0.3 * max_vow == doctest::Approx(2.3).epsilon(1e-12));
}

TEST_CASE("tokenizer: greedy longest match with vowel modifiers") {
  const auto flur = inv().tokenize("flu:r");
  CHECK(symbols(flur) == std::vector<std::string>{"f", "l", "uː", "r"});
  CHECK(flur.source == "flu:r");

  CHECK(symbols(inv().tokenize("fluːr")) ==
        std::vector<std::string>{"f", "l", "uː", "r"});
  CHECK(inv().tokenize("").phonemes.empty());
  // stress marks and syllable dots are discarded
  CHECK(symbols(inv().tokenize("ˈfluː.rə")) ==
        std::vector<std::string>{"f", "l", "uː", "r", "ə"});
  // tie-bar affricate is one phoneme
  CHECK(symbols(inv().tokenize("t͡sa")) == std::vector<std::string>{"t͡s", "a"});
  // plain digraph stays two phonemes (no digraph entries in the table)
  CHECK(symbols(inv().tokenize("tsa")) == std::vector<std::string>{"t", "s", "a"});
  // nasal variants: precomposed and combining forms agree (the canonical
  // symbol stores the combining tilde)
  const std::string nasal_a = "ã";
  CHECK(symbols(inv().tokenize("ã")) == std::vector<std::string>{nasal_a});
  CHECK(symbols(inv().tokenize("ã")) == std::vector<std::string>{nasal_a});
  CHECK(symbols(inv().tokenize("ãː")) == std::vector<std::string>{nasal_a + "ː"});
  CHECK(symbols(inv().tokenize("aː̃")) ==
        std::vector<std::string>{nasal_a + "ː"});
  CHECK(inv().tokenize("ã").phonemes[0].vowel().nasal);
  CHECK(inv().tokenize("ãː").phonemes[0].vowel().long_);
}

TEST_CASE("tokenizer: unknown input is a hard error with position") {
  CHECK_THROWS_AS(inv().tokenize("q7"), TokenizeError);
  try {
    inv().tokenize("q7");
  } catch (const TokenizeError& e) {
    CHECK(e.codepoint_index() == 1);
    CHECK(e.byte_offset() == 1);
    CHECK(e.offending() == "7");
  }
  // length mark with no preceding vowel
  CHECK_THROWS_AS(inv().tokenize(":a"), TokenizeError);
  // length mark after a consonant is not folded
  CHECK_THROWS_AS(inv().tokenize("tːa"), TokenizeError);
  try {
    inv().tokenize("abðc7x");
  } catch (const TokenizeError& e) {
    CHECK(e.codepoint_index() == 4);
  }
}

TEST_CASE("tokenize / render round trip") {
  for (const auto& p : inv().phonemes()) {
    const auto t = inv().tokenize(p.symbol);
    REQUIRE(t.phonemes.size() == 1);
    CHECK(t.phonemes[0].symbol == p.symbol);
  }

  std::mt19937_64 rng(20240517);
  std::uniform_int_distribution<std::size_t> pick(0, inv().phonemes().size() - 1);
  for (int round = 0; round < 200; ++round) {
    ipa::Transcription t;
    const std::size_t len = 1 + rng() % 6;
    for (std::size_t i = 0; i < len; ++i) {
      t.phonemes.push_back(inv().phonemes()[pick(rng)]);
    }
    const auto again = inv().tokenize(t.render());
    CHECK(symbols(again) == symbols(t));
  }
}

TEST_CASE("consonant and vowel substrings partition a transcription") {
  const auto t = inv().tokenize("kvjɛt");
  CHECK(t.size() == 5);
  CHECK(t.consonants().size() == 4);
  CHECK(t.vowels().size() == 1);
  CHECK(t.consonants()[0].symbol == "k");
  CHECK(t.vowels()[0].symbol == "ɛ");
}

TEST_CASE("inventory parse errors") {
  CHECK_THROWS_AS(PhonemeInventory::parse("", "t"), ValidationError);
  CHECK_THROWS_AS(PhonemeInventory::parse("lexidiff-phonemes 1\n", "t"),
                  ValidationError);

  const std::string header = "lexidiff-phonemes 1\n";
  // duplicate symbol
  CHECK(fails_mentioning(
      [&] {
        PhonemeInventory::parse(
            header + "p\tC\t0\t4\t0\t0\t0\t0\np\tC\t0\t4\t1\t0\t0\t0\n", "t");
      },
      "duplicate symbol"));
  // feature out of range
  CHECK(fails_mentioning(
      [&] { PhonemeInventory::parse(header + "p\tC\t12\t4\t0\t0\t0\t0\n", "t"); },
      "zone"));
  CHECK_THROWS_AS(
      PhonemeInventory::parse(header + "p\tC\t0\t3\t0\t0\t0\t0\n", "t"),
      ValidationError);
  CHECK_THROWS_AS(
      PhonemeInventory::parse(header + "a\tV\t2\t0\t0\t0\t0\n", "t"),
      ValidationError);
  // non-coarticulated consonants need integer zones
  CHECK_THROWS_AS(
      PhonemeInventory::parse(header + "p\tC\t1/2\t4\t0\t0\t0\t0\n", "t"),
      ValidationError);
  // feature-identical pair
  CHECK(fails_mentioning(
      [&] {
        PhonemeInventory::parse(
            header + "p\tC\t0\t4\t0\t0\t0\t0\nq\tC\t0\t4\t0\t0\t0\t0\n", "t");
      },
      "feature-identical"));
  // min-distance invariant violated (0.5 apart), offending pair named
  CHECK(fails_mentioning(
      [&] {
        PhonemeInventory::parse(
            header + "w\tC\t4\t7\t1\t0\t0\t1\nx\tC\t9/2\t7\t1\t0\t0\t1\n", "t");
      },
      "offending pairs"));
}
