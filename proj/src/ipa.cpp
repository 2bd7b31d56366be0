#include "lexidiff/ipa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "builtin_inventory.inc"

namespace lexidiff::ipa {

namespace {

constexpr char32_t kLengthMark = U'ː';      // ː
constexpr char32_t kAsciiColon = U':';           // accepted as a length mark
constexpr char32_t kCombiningTilde = U'̃';  // nasalization
constexpr char32_t kTieAbove = U'͡';
constexpr char32_t kTieBelow = U'͜';        // normalized to kTieAbove
constexpr char32_t kPrimaryStress = U'ˈ';
constexpr char32_t kSecondaryStress = U'ˌ';

bool is_discarded(char32_t cp) {
  return cp == kPrimaryStress || cp == kSecondaryStress || cp == U'.' ||
         cp == U' ';
}

struct Codepoint {
  char32_t value;
  std::size_t byte_offset;  // offset in the original string
};

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::vector<Codepoint> decode_utf8(std::string_view text,
                                   const std::string& origin) {
  std::vector<Codepoint> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto first = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = first;
    if (first >= 0xF0) {
      len = 4;
      cp = first & 0x07;
    } else if (first >= 0xE0) {
      len = 3;
      cp = first & 0x0F;
    } else if (first >= 0xC0) {
      len = 2;
      cp = first & 0x1F;
    } else if (first >= 0x80) {
      throw ValidationError(origin + ": invalid UTF-8 at byte " +
                            std::to_string(i));
    }
    if (i + len > text.size()) {
      throw ValidationError(origin + ": truncated UTF-8 at byte " +
                            std::to_string(i));
    }
    for (std::size_t k = 1; k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        throw ValidationError(origin + ": invalid UTF-8 at byte " +
                              std::to_string(i + k));
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    out.push_back({cp, i});
    i += len;
  }
  return out;
}

// Precomposed nasal vowels decompose to base + combining tilde so that the
// tilde folding below sees a single representation.
bool decompose_tilde(char32_t cp, char32_t& base) {
  switch (cp) {
    case U'ã': base = U'a'; return true;  // ã
    case U'ẽ': base = U'e'; return true;  // ẽ
    case U'ĩ': base = U'i'; return true;  // ĩ
    case U'õ': base = U'o'; return true;  // õ
    case U'ũ': base = U'u'; return true;  // ũ
    case U'ỹ': base = U'y'; return true;  // ỹ
    default: return false;
  }
}

double parse_number(const std::string& token, const std::string& context) {
  const auto slash = token.find('/');
  try {
    if (slash != std::string::npos) {
      const double num = std::stod(token.substr(0, slash));
      const double den = std::stod(token.substr(slash + 1));
      if (den == 0.0) throw std::invalid_argument("zero denominator");
      return num / den;
    }
    return std::stod(token);
  } catch (const std::exception&) {
    throw ValidationError(context + ": bad numeric field '" + token + "'");
  }
}

bool parse_flag(const std::string& token, const std::string& context) {
  if (token == "0") return false;
  if (token == "1") return true;
  throw ValidationError(context + ": flag field must be 0 or 1, got '" + token +
                        "'");
}

bool is_integral(double v) { return std::abs(v - std::round(v)) < 1e-9; }

void validate_consonant(const ConsonantFeatures& f, const std::string& context) {
  if (f.zone < 0.0 || f.zone > 11.0) {
    throw ValidationError(context + ": consonant zone out of [0,11]");
  }
  static const int allowed_airflow[] = {0, 4, 5, 6, 7, 8, 9};
  if (std::find(std::begin(allowed_airflow), std::end(allowed_airflow),
                f.airflow) == std::end(allowed_airflow)) {
    throw ValidationError(context + ": airflow must be one of 0,4,5,6,7,8,9");
  }
  if (f.coarticulated) {
    // mean of two distinct integer zones: an integer or half-integer
    if (!is_integral(f.zone * 2.0)) {
      throw ValidationError(context +
                            ": coarticulated zone must be a mean of two "
                            "integer zones");
    }
  } else if (!is_integral(f.zone)) {
    throw ValidationError(context +
                          ": non-coarticulated consonant needs an integer zone");
  }
}

void validate_vowel(const VowelFeatures& f, const std::string& context) {
  if (f.zone < -5.0 / 3.0 - 1e-9 || f.zone > 1.0 + 1e-9) {
    throw ValidationError(context + ": vowel zone out of [-5/3,1]");
  }
  if (f.openness < -1.0 || f.openness > 1.0) {
    throw ValidationError(context + ": vowel openness out of [-1,1]");
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0;
  for (char ch : s) {
    if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace

const ConsonantFeatures& Phoneme::consonant() const {
  if (!is_consonant()) {
    throw ContractViolation("phoneme '" + symbol + "' is not a consonant");
  }
  return std::get<ConsonantFeatures>(features);
}

const VowelFeatures& Phoneme::vowel() const {
  if (!is_vowel()) {
    throw ContractViolation("phoneme '" + symbol + "' is not a vowel");
  }
  return std::get<VowelFeatures>(features);
}

bool same_features(const Phoneme& a, const Phoneme& b) {
  return a.features == b.features;
}

double consonant_distance(const Phoneme& a, const Phoneme& b) {
  const ConsonantFeatures& x = a.consonant();
  const ConsonantFeatures& y = b.consonant();
  return std::abs(x.zone - y.zone) + std::abs(x.airflow - y.airflow) +
         std::abs(int(x.voiced) - int(y.voiced)) +
         std::abs(int(x.lateral) - int(y.lateral)) +
         std::abs(int(x.sibilant) - int(y.sibilant)) +
         std::abs(int(x.coarticulated) - int(y.coarticulated));
}

double vowel_distance(const Phoneme& a, const Phoneme& b) {
  const VowelFeatures& x = a.vowel();
  const VowelFeatures& y = b.vowel();
  return std::abs(x.zone - y.zone) + std::abs(x.openness - y.openness) +
         std::abs(int(x.rounded) - int(y.rounded)) +
         std::abs(int(x.long_) - int(y.long_)) +
         std::abs(int(x.nasal) - int(y.nasal));
}

double phoneme_distance(const Phoneme& a, const Phoneme& b) {
  if (a.kind() != b.kind()) {
    throw ContractViolation("phoneme distance needs a same-kind pair, got '" +
                            a.symbol + "' vs '" + b.symbol + "'");
  }
  return a.is_consonant() ? consonant_distance(a, b) : vowel_distance(a, b);
}

double substitution_weight(const Phoneme& a, const Phoneme& b, double a_con,
                           double a_vow) {
  if (a.kind() != b.kind()) {
    throw ContractViolation("substitution weight needs a same-kind pair, got '" +
                            a.symbol + "' vs '" + b.symbol + "'");
  }
  return a.is_consonant() ? a_con * consonant_distance(a, b)
                          : a_vow * vowel_distance(a, b);
}

std::vector<Phoneme> Transcription::consonants() const {
  std::vector<Phoneme> out;
  for (const Phoneme& p : phonemes) {
    if (p.is_consonant()) out.push_back(p);
  }
  return out;
}

std::vector<Phoneme> Transcription::vowels() const {
  std::vector<Phoneme> out;
  for (const Phoneme& p : phonemes) {
    if (p.is_vowel()) out.push_back(p);
  }
  return out;
}

std::string Transcription::render() const {
  std::string out;
  for (const Phoneme& p : phonemes) out += p.symbol;
  return out;
}

PhonemeInventory PhonemeInventory::parse(std::string_view text,
                                         const std::string& origin) {
  PhonemeInventory inv;
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string context = origin + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line.rfind("lexidiff-phonemes", 0) != 0) {
        throw ValidationError(context +
                              ": missing 'lexidiff-phonemes <version>' header");
      }
      header_seen = true;
      continue;
    }

    const auto fields = split_tabs(line);
    if (fields.size() < 2) {
      throw ValidationError(context + ": expected tab-separated fields");
    }
    const std::string& symbol = fields[0];
    const std::string& kind = fields[1];
    if (symbol.empty()) {
      throw ValidationError(context + ": empty symbol");
    }

    Phoneme phoneme;
    phoneme.symbol = symbol;
    if (kind == "C") {
      if (fields.size() != 8) {
        throw ValidationError(context + ": consonant rows need 8 fields");
      }
      ConsonantFeatures f;
      f.zone = parse_number(fields[2], context);
      const double airflow = parse_number(fields[3], context);
      if (!is_integral(airflow)) {
        throw ValidationError(context + ": airflow must be an integer");
      }
      f.airflow = static_cast<int>(std::lround(airflow));
      f.voiced = parse_flag(fields[4], context);
      f.lateral = parse_flag(fields[5], context);
      f.sibilant = parse_flag(fields[6], context);
      f.coarticulated = parse_flag(fields[7], context);
      validate_consonant(f, context + " ('" + symbol + "')");
      phoneme.features = f;
    } else if (kind == "V") {
      if (fields.size() != 7) {
        throw ValidationError(context + ": vowel rows need 7 fields");
      }
      VowelFeatures f;
      f.zone = parse_number(fields[2], context);
      f.openness = parse_number(fields[3], context);
      f.rounded = parse_flag(fields[4], context);
      f.long_ = parse_flag(fields[5], context);
      f.nasal = parse_flag(fields[6], context);
      validate_vowel(f, context + " ('" + symbol + "')");
      phoneme.features = f;
    } else {
      throw ValidationError(context + ": kind must be C or V, got '" + kind +
                            "'");
    }

    if (inv.by_symbol_.count(symbol) != 0) {
      throw ValidationError(context + ": duplicate symbol '" + symbol + "'");
    }
    inv.by_symbol_.emplace(symbol, inv.entries_.size());
    inv.entries_.push_back(std::move(phoneme));
    inv.base_of_.push_back(inv.entries_.size() - 1);
  }

  if (!header_seen) {
    throw ValidationError(origin + ": empty inventory");
  }
  if (inv.entries_.empty()) {
    throw ValidationError(origin + ": inventory lists no phonemes");
  }

  // Generate long / nasal / long-nasal variants for base vowels.
  const std::size_t base_count = inv.entries_.size();
  for (std::size_t i = 0; i < base_count; ++i) {
    if (!inv.entries_[i].is_vowel()) continue;
    const VowelFeatures base = std::get<VowelFeatures>(inv.entries_[i].features);
    if (base.long_ || base.nasal) continue;
    for (int flags = 1; flags < 4; ++flags) {
      const bool make_nasal = (flags & 1) != 0;
      const bool make_long = (flags & 2) != 0;
      std::string symbol = inv.entries_[i].symbol;
      if (make_nasal) append_utf8(symbol, kCombiningTilde);
      if (make_long) append_utf8(symbol, kLengthMark);
      if (inv.by_symbol_.count(symbol) != 0) continue;  // explicit row wins
      VowelFeatures f = base;
      f.long_ = make_long;
      f.nasal = make_nasal;
      Phoneme variant;
      variant.symbol = symbol;
      variant.features = f;
      inv.by_symbol_.emplace(symbol, inv.entries_.size());
      inv.entries_.push_back(std::move(variant));
      inv.base_of_.push_back(i);
    }
  }

  inv.index_entries();
  inv.compute_stats(origin);
  return inv;
}

PhonemeInventory PhonemeInventory::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open inventory file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

const PhonemeInventory& PhonemeInventory::builtin() {
  static const PhonemeInventory inventory =
      parse(kBuiltinInventoryTsv, "<builtin>");
  return inventory;
}

void PhonemeInventory::index_entries() {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto cps = decode_utf8(entries_[i].symbol, "<symbol>");
    by_first_cp_[cps.front().value].push_back(i);
    if (entries_[i].is_vowel()) {
      const auto& f = std::get<VowelFeatures>(entries_[i].features);
      vowel_variants_[{base_of_[i], f.long_, f.nasal}] = i;
    }
  }
  // longest symbols first so greedy matching prefers them
  for (auto& [cp, indices] : by_first_cp_) {
    std::sort(indices.begin(), indices.end(), [this](std::size_t a, std::size_t b) {
      const auto la = codepoint_count(entries_[a].symbol);
      const auto lb = codepoint_count(entries_[b].symbol);
      if (la != lb) return la > lb;
      return entries_[a].symbol < entries_[b].symbol;
    });
  }
}

void PhonemeInventory::compute_stats(const std::string& origin) {
  InventoryStats s;
  std::vector<std::size_t> consonants, vowels;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    (entries_[i].is_consonant() ? consonants : vowels).push_back(i);
  }
  s.consonant_count = consonants.size();
  s.vowel_count = vowels.size();

  auto scan = [this](const std::vector<std::size_t>& group, double& min_nonzero,
                     double& max_value, std::vector<std::string>& zero_pairs) {
    min_nonzero =
        group.size() > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    max_value = 0.0;
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = a + 1; b < group.size(); ++b) {
        const double d =
            phoneme_distance(entries_[group[a]], entries_[group[b]]);
        if (d == 0.0) {
          zero_pairs.push_back("'" + entries_[group[a]].symbol + "'/'" +
                               entries_[group[b]].symbol + "'");
          continue;
        }
        min_nonzero = std::min(min_nonzero, d);
        max_value = std::max(max_value, d);
      }
    }
  };

  std::vector<std::string> zero_pairs;
  scan(consonants, s.min_consonant_distance, s.max_consonant_distance,
       zero_pairs);
  scan(vowels, s.min_vowel_distance, s.max_vowel_distance, zero_pairs);
  if (!zero_pairs.empty()) {
    std::string msg = origin + ": feature-identical symbol pairs:";
    for (const auto& p : zero_pairs) msg += " " + p;
    throw ValidationError(msg);
  }

  const double tol = 1e-9;
  std::vector<std::string> violations;
  if (s.consonant_count > 1 &&
      std::abs(s.min_consonant_distance - 1.0) > tol) {
    violations.push_back("minimum consonant distance is " +
                         std::to_string(s.min_consonant_distance) +
                         ", expected 1");
  }
  if (s.vowel_count > 1 && std::abs(s.min_vowel_distance - 0.25) > tol) {
    violations.push_back("minimum vowel distance is " +
                         std::to_string(s.min_vowel_distance) +
                         ", expected 0.25");
  }
  if (s.vowel_count > 1 &&
      std::abs(s.max_vowel_distance - 23.0 / 3.0) > tol) {
    violations.push_back("maximum vowel distance is " +
                         std::to_string(s.max_vowel_distance) +
                         ", expected 23/3");
  }
  if (!violations.empty()) {
    // Name the extremal pairs so a broken table is debuggable.
    std::string detail;
    for (const auto& group :
         {std::cref(consonants), std::cref(vowels)}) {
      for (std::size_t a = 0; a < group.get().size(); ++a) {
        for (std::size_t b = a + 1; b < group.get().size(); ++b) {
          const double d = phoneme_distance(entries_[group.get()[a]],
                                            entries_[group.get()[b]]);
          const bool is_con = entries_[group.get()[a]].is_consonant();
          const double bad_min = is_con ? 1.0 : 0.25;
          if (d < bad_min - tol) {
            detail += " '" + entries_[group.get()[a]].symbol + "'/'" +
                      entries_[group.get()[b]].symbol + "' at " +
                      std::to_string(d) + ";";
          }
        }
      }
    }
    std::string msg = origin + ": inventory distance invariants violated:";
    for (const auto& v : violations) msg += " " + v + ";";
    if (!detail.empty()) msg += " offending pairs:" + detail;
    throw ValidationError(msg);
  }

  stats_ = s;
}

const Phoneme* PhonemeInventory::find(std::string_view symbol) const {
  const auto it = by_symbol_.find(std::string(symbol));
  if (it != by_symbol_.end()) return &entries_[it->second];
  // retry with precomposed nasal vowels decomposed to base + combining tilde
  std::string normalized;
  bool changed = false;
  for (const Codepoint& c : decode_utf8(symbol, "<symbol>")) {
    char32_t base = 0;
    if (decompose_tilde(c.value, base)) {
      append_utf8(normalized, base);
      append_utf8(normalized, kCombiningTilde);
      changed = true;
    } else {
      append_utf8(normalized, c.value);
    }
  }
  if (!changed) return nullptr;
  const auto retry = by_symbol_.find(normalized);
  return retry == by_symbol_.end() ? nullptr : &entries_[retry->second];
}

const Phoneme& PhonemeInventory::at(std::string_view symbol) const {
  const Phoneme* p = find(symbol);
  if (p == nullptr) {
    throw ValidationError("unknown phoneme symbol '" + std::string(symbol) +
                          "'");
  }
  return *p;
}

Transcription PhonemeInventory::tokenize(std::string_view text) const {
  Transcription result;
  result.source = std::string(text);

  auto raw = decode_utf8(text, "<ipa>");
  // normalize: drop stress marks / separators, unify tie bars, decompose
  // precomposed nasal vowels
  std::vector<Codepoint> cps;
  cps.reserve(raw.size());
  for (const Codepoint& c : raw) {
    if (is_discarded(c.value)) continue;
    if (c.value == kTieBelow) {
      cps.push_back({kTieAbove, c.byte_offset});
      continue;
    }
    char32_t base = 0;
    if (decompose_tilde(c.value, base)) {
      cps.push_back({base, c.byte_offset});
      cps.push_back({kCombiningTilde, c.byte_offset});
      continue;
    }
    cps.push_back(c);
  }

  std::size_t pos = 0;
  while (pos < cps.size()) {
    const auto candidates_it = by_first_cp_.find(cps[pos].value);
    std::size_t matched = 0;
    std::size_t matched_len = 0;
    bool found = false;
    if (candidates_it != by_first_cp_.end()) {
      for (std::size_t idx : candidates_it->second) {
        const auto sym = decode_utf8(entries_[idx].symbol, "<symbol>");
        if (sym.size() > cps.size() - pos) continue;
        bool ok = true;
        for (std::size_t k = 0; k < sym.size(); ++k) {
          if (sym[k].value != cps[pos + k].value) {
            ok = false;
            break;
          }
        }
        if (ok) {
          matched = idx;
          matched_len = sym.size();
          found = true;
          break;  // candidates are longest-first
        }
      }
    }
    if (!found) {
      std::string offending;
      append_utf8(offending, cps[pos].value);
      throw TokenizeError(
          "unknown IPA symbol '" + offending + "' at codepoint index " +
              std::to_string(pos) + " (byte offset " +
              std::to_string(cps[pos].byte_offset) + ") in \"" +
              std::string(text) + "\"",
          pos, cps[pos].byte_offset, offending);
    }

    std::size_t entry = matched;
    pos += matched_len;

    // fold length marks and nasal tildes into the preceding vowel
    while (pos < cps.size() &&
           (cps[pos].value == kLengthMark || cps[pos].value == kAsciiColon ||
            cps[pos].value == kCombiningTilde)) {
      if (!entries_[entry].is_vowel()) break;  // modifier stays unmatched
      const auto& f = std::get<VowelFeatures>(entries_[entry].features);
      bool want_long = f.long_;
      bool want_nasal = f.nasal;
      if (cps[pos].value == kCombiningTilde) {
        want_nasal = true;
      } else {
        want_long = true;
      }
      const auto variant =
          vowel_variants_.find({base_of_[entry], want_long, want_nasal});
      if (variant == vowel_variants_.end()) {
        std::string offending;
        append_utf8(offending, cps[pos].value);
        throw TokenizeError(
            "no variant of '" + entries_[base_of_[entry]].symbol +
                "' for modifier at codepoint index " + std::to_string(pos) +
                " (byte offset " + std::to_string(cps[pos].byte_offset) +
                ") in \"" + std::string(text) + "\"",
            pos, cps[pos].byte_offset, offending);
      }
      entry = variant->second;
      ++pos;
    }
    if (pos < cps.size() &&
        (cps[pos].value == kLengthMark || cps[pos].value == kAsciiColon ||
         cps[pos].value == kCombiningTilde) &&
        !entries_[entry].is_vowel()) {
      std::string offending;
      append_utf8(offending, cps[pos].value);
      throw TokenizeError(
          "length/nasal modifier after a consonant at codepoint index " +
              std::to_string(pos) + " (byte offset " +
              std::to_string(cps[pos].byte_offset) + ") in \"" +
              std::string(text) + "\"",
          pos, cps[pos].byte_offset, offending);
    }

    result.phonemes.push_back(entries_[entry]);
  }
  return result;
}

}  // namespace lexidiff::ipa
