// Copyright 2026 The czgec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Two-pass synthetic error generation.
//
// For each clean sentence a character pass and then a token pass each draw
// an error rate from a clamped normal distribution, turn it into a count of
// units to perturb, and apply one randomly chosen operation per unit. The
// typical-error rule engine optionally runs last over every token, whether
// or not the token was already perturbed.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "czgec/corpus_io.hpp"
#include "czgec/error.hpp"
#include "czgec/providers.hpp"
#include "czgec/rng.hpp"
#include "czgec/typical_errors.hpp"
#include "czgec/unicode.hpp"

namespace czgec {

enum class CharOp { kSubstitute, kInsert, kDelete, kSwap, kDiacritics };
enum class TokenOp { kSubAspell, kSubMorph, kInsert, kDelete, kSwap, kRecase };

inline constexpr std::size_t kCharOpCount = 5;
inline constexpr std::size_t kTokenOpCount = 6;
inline constexpr std::array<std::string_view, kCharOpCount> kCharOpNames = {
    "char_sub", "char_ins", "char_del", "char_swap", "diacritics"};
inline constexpr std::array<std::string_view, kTokenOpCount> kTokenOpNames = {
    "sub_aspell", "sub_morph", "ins", "del", "swap", "recase"};

inline std::string_view to_string(CharOp op) { return kCharOpNames[static_cast<std::size_t>(op)]; }
inline std::string_view to_string(TokenOp op) { return kTokenOpNames[static_cast<std::size_t>(op)]; }

inline constexpr std::u32string_view kCzechAlphabet =
    U"aábcčdďeéěfghiíjklmnňoópqrřsštťuúůvwxyýzž";

template <std::size_t N>
struct PassConfig {
  double rate_mean = 0.0;
  double rate_std = 0.0;
  std::array<double, N> op_weights{};
};

struct NoiseProfile {
  PassConfig<kCharOpCount> char_pass{0.02, 0.01, {0.2, 0.2, 0.2, 0.2, 0.2}};
  PassConfig<kTokenOpCount> token_pass{0.15, 0.2, {0.7, 0.0, 0.1, 0.05, 0.1, 0.05}};
  bool typical_errors_enabled = false;
  std::optional<std::filesystem::path> rule_set_path;
  std::u32string alphabet{kCzechAlphabet};
  std::size_t top_k = 5;  ///< dictionary candidates sampled from
  int max_distance = 2;   ///< dictionary edit-distance bound

  /// Scales each weight vector to sum to 1. Throws on negative or all-zero
  /// weights and on negative rates; returns warnings for suspicious values.
  std::vector<std::string> normalize() {
    std::vector<std::string> warnings;
    auto fix = [&](auto& pass, std::string_view name) {
      if (pass.rate_mean < 0 || pass.rate_std < 0)
        throw Error(std::string(name) + " pass: negative rate parameter");
      if (pass.rate_mean > 1)
        warnings.push_back(std::string(name) + " pass: rate_mean above 1 saturates");
      double sum = 0;
      for (double w : pass.op_weights) {
        if (!(w >= 0)) throw Error(std::string(name) + " pass: negative op weight");
        sum += w;
      }
      if (sum <= 0) throw Error(std::string(name) + " pass: op weights sum to zero");
      for (double& w : pass.op_weights) w /= sum;
    };
    fix(char_pass, "char");
    fix(token_pass, "token");
    if (alphabet.empty()) throw Error("empty character alphabet");
    if (top_k == 0) throw Error("top_k must be positive");
    if (max_distance < 1 || max_distance > Lexicon::kIndexDistance)
      throw Error("max_distance must be 1 or 2");
    return warnings;
  }
};

enum class NoisePreset { kAspell, kMorphoDiTa, kTypicalErrors, kMate };

inline NoiseProfile preset_profile(NoisePreset preset) {
  NoiseProfile p;
  switch (preset) {
    case NoisePreset::kAspell:
      p.token_pass.op_weights = {0.7, 0.0, 0.1, 0.05, 0.1, 0.05};
      p.typical_errors_enabled = false;
      break;
    case NoisePreset::kMorphoDiTa:
      p.token_pass.op_weights = {0.5, 0.2, 0.1, 0.05, 0.1, 0.05};
      p.typical_errors_enabled = false;
      break;
    case NoisePreset::kTypicalErrors:
      p.token_pass.op_weights = {0.7, 0.0, 0.1, 0.05, 0.1, 0.05};
      p.typical_errors_enabled = true;
      break;
    case NoisePreset::kMate:
      p.token_pass.op_weights = {0.5, 0.2, 0.1, 0.05, 0.1, 0.05};
      p.typical_errors_enabled = true;
      break;
  }
  return p;
}

inline std::optional<NoisePreset> parse_preset(std::string_view name) {
  const std::string n = unicode::lower(name);
  if (n == "aspell") return NoisePreset::kAspell;
  if (n == "morphodita") return NoisePreset::kMorphoDiTa;
  if (n == "typical" || n == "typical-errors" || n == "typicalerrors")
    return NoisePreset::kTypicalErrors;
  if (n == "mate") return NoisePreset::kMate;
  return std::nullopt;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw Error("profile: bad number for " + key + ": '" + v + "'");
  return d;
}

template <std::size_t N>
std::array<double, N> parse_weights(const std::string& v, const std::string& key) {
  // Commas and/or whitespace separate the weights.
  std::string spaced = v;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::array<double, N> out{};
  std::size_t i = 0;
  std::string item;
  while (in >> item) {
    if (i == N) throw Error("profile: " + key + " needs " + std::to_string(N) + " weights");
    out[i++] = parse_double(item, key);
  }
  if (i != N) throw Error("profile: " + key + " needs " + std::to_string(N) + " weights");
  return out;
}

}  // namespace detail

/// Reads a "key = value" profile. Keys:
///   preset, char.rate_mean, char.rate_std, char.op_weights (5, comma or space separated),
///   token.rate_mean, token.rate_std, token.op_weights (6), typical_errors,
///   rules, alphabet, top_k, max_distance.
/// A `preset` line resets every key to that preset's values, so it belongs
/// first. Relative rule paths resolve against `base_dir`.
inline NoiseProfile parse_profile(std::istream& in, const std::string& name = "<profile>",
                                  const std::filesystem::path& base_dir = {},
                                  std::vector<std::string>* warnings = nullptr) {
  NoiseProfile p;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(name, line_no, "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "preset") {
        auto pr = parse_preset(value);
        if (!pr) throw Error("unknown preset '" + value + "'");
        p = preset_profile(*pr);
      } else if (key == "char.rate_mean") {
        p.char_pass.rate_mean = detail::parse_double(value, key);
      } else if (key == "char.rate_std") {
        p.char_pass.rate_std = detail::parse_double(value, key);
      } else if (key == "char.op_weights") {
        p.char_pass.op_weights = detail::parse_weights<kCharOpCount>(value, key);
      } else if (key == "token.rate_mean") {
        p.token_pass.rate_mean = detail::parse_double(value, key);
      } else if (key == "token.rate_std") {
        p.token_pass.rate_std = detail::parse_double(value, key);
      } else if (key == "token.op_weights") {
        p.token_pass.op_weights = detail::parse_weights<kTokenOpCount>(value, key);
      } else if (key == "typical_errors") {
        if (value == "true" || value == "1" || value == "yes") p.typical_errors_enabled = true;
        else if (value == "false" || value == "0" || value == "no") p.typical_errors_enabled = false;
        else throw Error("typical_errors must be true or false");
      } else if (key == "rules") {
        std::filesystem::path rp = value;
        p.rule_set_path = rp.is_relative() && !base_dir.empty() ? base_dir / rp : rp;
      } else if (key == "alphabet") {
        p.alphabet = unicode::to_u32(unicode::nfc(value));
      } else if (key == "top_k") {
        p.top_k = static_cast<std::size_t>(detail::parse_double(value, key));
      } else if (key == "max_distance") {
        p.max_distance = static_cast<int>(detail::parse_double(value, key));
      } else {
        throw Error("unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(name, line_no, e.what());
    }
  }
  auto w = p.normalize();
  if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
  return p;
}

inline NoiseProfile load_profile(const std::filesystem::path& path,
                                 std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile " + path.string());
  return parse_profile(in, path.string(), path.parent_path(), warnings);
}

inline std::string format_profile(const NoiseProfile& p) {
  std::ostringstream out;
  out.precision(17);
  auto weights = [&](const auto& arr) {
    for (std::size_t i = 0; i < arr.size(); ++i) out << (i ? "," : "") << arr[i];
  };
  out << "char.rate_mean = " << p.char_pass.rate_mean << '\n';
  out << "char.rate_std = " << p.char_pass.rate_std << '\n';
  out << "char.op_weights = ";
  weights(p.char_pass.op_weights);
  out << "\ntoken.rate_mean = " << p.token_pass.rate_mean << '\n';
  out << "token.rate_std = " << p.token_pass.rate_std << '\n';
  out << "token.op_weights = ";
  weights(p.token_pass.op_weights);
  out << "\ntypical_errors = " << (p.typical_errors_enabled ? "true" : "false") << '\n';
  if (p.rule_set_path) out << "rules = " << p.rule_set_path->string() << '\n';
  out << "alphabet = " << unicode::to_utf8(p.alphabet) << '\n';
  out << "top_k = " << p.top_k << '\n';
  out << "max_distance = " << p.max_distance << '\n';
  return out.str();
}

/// Frequency-weighted word source for the token insertion op.
class InsertionVocabulary {
 public:
  InsertionVocabulary() = default;

  explicit InsertionVocabulary(std::vector<std::pair<std::string, double>> words) {
    double acc = 0;
    for (auto& [w, f] : words) {
      if (w.empty() || !(f > 0)) continue;
      acc += f;
      words_.push_back(unicode::nfc(w));
      cumulative_.push_back(acc);
    }
  }

  static InsertionVocabulary from_lexicon(const Lexicon& lex) {
    std::vector<std::pair<std::string, double>> words;
    words.reserve(lex.size());
    for (std::size_t i = 0; i < lex.size(); ++i) words.emplace_back(lex.form(i), lex.frequency(i));
    return InsertionVocabulary(std::move(words));
  }

  /// "word[<TAB>frequency]" lines, like a lexicon.
  static InsertionVocabulary load(const std::filesystem::path& path) {
    const Lexicon lex = Lexicon::load(path);
    return from_lexicon(lex);
  }

  bool empty() const noexcept { return words_.empty(); }
  std::size_t size() const noexcept { return words_.size(); }

  const std::string& sample(RngStream& rng) const {
    const double r = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    if (it == cumulative_.end()) --it;
    return words_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

 private:
  std::vector<std::string> words_;
  std::vector<double> cumulative_;
};

/// Read-only provider data shared by all workers. Null members are absent.
struct Providers {
  const Lexicon* lexicon = nullptr;
  const MorphLexicon* morph = nullptr;
  const InsertionVocabulary* insertions = nullptr;
  const DiacriticsTable* diacritics = &DiacriticsTable::czech();
};

enum class OpStatus { kApplied, kSkipped };

struct CharOpResult {
  std::string word;
  OpStatus status = OpStatus::kApplied;
};

/// Number of units to perturb: p ~ Normal(mean, std) clamped to [0, 1],
/// rounded p * n_units.
inline std::size_t sample_error_count(std::size_t n_units, double rate_mean, double rate_std,
                                      RngStream& rng) {
  double p = rng.normal(rate_mean, rate_std);
  p = std::clamp(p, 0.0, 1.0);
  const auto k = static_cast<std::size_t>(std::llround(p * static_cast<double>(n_units)));
  return std::min(k, n_units);
}

/// One character-level edit on a word. Inapplicable ops (swap on a single
/// letter, diacritics with nothing to vary) return the word unchanged and
/// kSkipped. The result may be empty after deleting a one-letter word.
inline CharOpResult apply_char_op(std::string_view word, CharOp op, RngStream& rng,
                                  std::u32string_view alphabet = kCzechAlphabet,
                                  const DiacriticsTable& table = DiacriticsTable::czech()) {
  std::u32string w = unicode::to_u32(word);
  if (w.empty() && op != CharOp::kInsert) return {std::string(word), OpStatus::kSkipped};
  switch (op) {
    case CharOp::kSubstitute: {
      const std::size_t pos = rng.below(w.size());
      const char32_t cur = w[pos];
      const char32_t cur_lower = unicode::to_lower(cur);
      std::u32string pool;
      for (char32_t c : alphabet)
        if (c != cur_lower) pool.push_back(c);
      if (pool.empty()) return {std::string(word), OpStatus::kSkipped};
      char32_t c = pool[rng.below(pool.size())];
      if (unicode::is_upper(cur)) c = unicode::to_upper(c);
      w[pos] = c;
      break;
    }
    case CharOp::kInsert: {
      const std::size_t pos = rng.below(w.size() + 1);
      char32_t c = alphabet[rng.below(alphabet.size())];
      if (unicode::casing_of(w) == unicode::Casing::kUpper) c = unicode::to_upper(c);
      w.insert(w.begin() + static_cast<std::ptrdiff_t>(pos), c);
      break;
    }
    case CharOp::kDelete:
      w.erase(rng.below(w.size()), 1);
      break;
    case CharOp::kSwap: {
      std::vector<std::size_t> sites;
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] != w[i + 1]) sites.push_back(i);
      if (sites.empty()) return {std::string(word), OpStatus::kSkipped};
      const std::size_t i = sites[rng.below(sites.size())];
      std::swap(w[i], w[i + 1]);
      break;
    }
    case CharOp::kDiacritics: {
      std::vector<std::size_t> sites;
      for (std::size_t i = 0; i < w.size(); ++i)
        if (table.has_variants(w[i])) sites.push_back(i);
      if (sites.empty()) return {std::string(word), OpStatus::kSkipped};
      const std::size_t i = sites[rng.below(sites.size())];
      const std::u32string variants = table.variants(w[i]);
      w[i] = variants[rng.below(variants.size())];
      break;
    }
  }
  return {unicode::nfc(unicode::to_utf8(w)), OpStatus::kApplied};
}

namespace detail {

inline OpStatus recase_token(std::string& token) {
  std::u32string w = unicode::to_u32(token);
  auto first = std::find_if(w.begin(), w.end(), unicode::is_alpha);
  if (first == w.end()) return OpStatus::kSkipped;
  if (unicode::is_upper(*first)) {
    for (auto& c : w) c = unicode::to_lower(c);
  } else {
    *first = unicode::to_upper(*first);
  }
  std::string out = unicode::to_utf8(w);
  if (out == token) return OpStatus::kSkipped;
  token = std::move(out);
  return OpStatus::kApplied;
}

}  // namespace detail

/// One token-level edit at `index`, in place.
inline OpStatus apply_token_op(std::vector<std::string>& tokens, std::size_t index, TokenOp op,
                               const Providers& providers, RngStream& rng,
                               std::size_t top_k = 5, int max_distance = 2) {
  if (index >= tokens.size()) throw Error("token index out of range");
  std::string& tok = tokens[index];
  switch (op) {
    case TokenOp::kSubAspell: {
      if (!providers.lexicon || !unicode::has_alpha(tok)) return OpStatus::kSkipped;
      auto cands = providers.lexicon->suggest(tok, max_distance, top_k);
      if (cands.empty()) return OpStatus::kSkipped;
      tok = cands[rng.below(cands.size())].form;
      return OpStatus::kApplied;
    }
    case TokenOp::kSubMorph: {
      if (!providers.morph) return OpStatus::kSkipped;
      auto forms = providers.morph->forms(tok);
      if (forms.empty()) return OpStatus::kSkipped;
      tok = forms[rng.below(forms.size())];
      return OpStatus::kApplied;
    }
    case TokenOp::kInsert: {
      if (!providers.insertions || providers.insertions->empty()) return OpStatus::kSkipped;
      const std::size_t at = index + rng.below(2);
      const std::string& w = providers.insertions->sample(rng);
      tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), w);
      return OpStatus::kApplied;
    }
    case TokenOp::kDelete:
      if (tokens.size() <= 1) return OpStatus::kSkipped;
      tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(index));
      return OpStatus::kApplied;
    case TokenOp::kSwap: {
      if (tokens.size() < 2) return OpStatus::kSkipped;
      const std::size_t other = index + 1 < tokens.size() ? index + 1 : index - 1;
      if (tokens[index] == tokens[other]) return OpStatus::kSkipped;
      std::swap(tokens[index], tokens[other]);
      return OpStatus::kApplied;
    }
    case TokenOp::kRecase:
      return detail::recase_token(tok);
  }
  return OpStatus::kSkipped;
}

/// Sentence-valued convenience wrapper over the in-place op.
inline Sentence apply_token_op(const Sentence& sentence, std::size_t index, TokenOp op,
                               const Providers& providers, RngStream& rng,
                               OpStatus* status = nullptr) {
  std::vector<std::string> tokens = sentence.tokens;
  const OpStatus s = apply_token_op(tokens, index, op, providers, rng);
  if (status) *status = s;
  return from_tokens(std::move(tokens));
}

enum class Pass { kChar, kToken, kTypical };

inline std::string_view to_string(Pass p) {
  switch (p) {
    case Pass::kChar: return "char";
    case Pass::kToken: return "token";
    case Pass::kTypical: return "typical";
  }
  return "?";
}

/// One drawn operation. `op` indexes kCharOpNames/kTokenOpNames; typical
/// firings carry the rule id instead.
struct OpRecord {
  Pass pass = Pass::kChar;
  std::size_t op = 0;
  std::string rule_id;
  std::size_t token_index = 0;
  OpStatus status = OpStatus::kApplied;

  std::string_view name() const {
    switch (pass) {
      case Pass::kChar: return kCharOpNames[op];
      case Pass::kToken: return kTokenOpNames[op];
      case Pass::kTypical: return rule_id;
    }
    return {};
  }
};

struct NoisedPair {
  Sentence noisy;
  Sentence clean;
  std::vector<OpRecord> ops;
};

/// Noises one sentence: character pass, token pass, then typical errors.
/// Pure given (clean, profile, providers, rules, rng state).
inline NoisedPair noise_sentence(const Sentence& clean, const NoiseProfile& profile,
                                 const Providers& providers, const RuleSet* rules,
                                 RngStream& rng) {
  NoisedPair out;
  out.clean = clean;
  std::vector<std::string> tokens = clean.tokens;
  const DiacriticsTable& table = providers.diacritics ? *providers.diacritics
                                                      : DiacriticsTable::czech();

  // Character pass over words (pure punctuation is not a word).
  {
    std::vector<std::size_t> words;
    for (std::size_t i = 0; i < tokens.size(); ++i)
      if (!unicode::is_all_punct(tokens[i])) words.push_back(i);
    if (!words.empty()) {
      const std::size_t k = sample_error_count(words.size(), profile.char_pass.rate_mean,
                                               profile.char_pass.rate_std, rng);
      bool any_empty = false;
      for (std::size_t pick : rng.choose(words.size(), k)) {
        const std::size_t i = words[pick];
        const auto op = static_cast<CharOp>(rng.weighted(profile.char_pass.op_weights));
        auto res = apply_char_op(tokens[i], op, rng, profile.alphabet, table);
        tokens[i] = std::move(res.word);
        any_empty |= tokens[i].empty();
        out.ops.push_back({Pass::kChar, static_cast<std::size_t>(op), {}, i, res.status});
      }
      if (any_empty)
        std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
    }
  }

  // Token pass. Ops are drawn in selection order and applied right to left
  // so pending positions stay valid.
  if (!tokens.empty()) {
    const std::size_t k = sample_error_count(tokens.size(), profile.token_pass.rate_mean,
                                             profile.token_pass.rate_std, rng);
    std::vector<std::pair<std::size_t, TokenOp>> plan;
    for (std::size_t pos : rng.choose(tokens.size(), k))
      plan.emplace_back(pos, static_cast<TokenOp>(rng.weighted(profile.token_pass.op_weights)));
    std::sort(plan.begin(), plan.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [pos, op] : plan) {
      const OpStatus s = pos < tokens.size()
                             ? apply_token_op(tokens, pos, op, providers, rng, profile.top_k,
                                              profile.max_distance)
                             : OpStatus::kSkipped;
      out.ops.push_back({Pass::kToken, static_cast<std::size_t>(op), {}, pos, s});
    }
  }

  if (profile.typical_errors_enabled && rules && !rules->empty()) {
    std::vector<RuleFiring> fired;
    tokens = rules->apply(tokens, rng, &fired);
    for (auto& f : fired)
      out.ops.push_back({Pass::kTypical, 0, std::move(f.rule_id), f.token_index, OpStatus::kApplied});
  }

  out.noisy = from_tokens(std::move(tokens));
  return out;
}

/// Bundles a profile with its providers and rules; noising a sentence is
/// then a pure function of (seed, sentence_index, sentence).
class Noiser {
 public:
  Noiser(NoiseProfile profile, Providers providers, RuleSet rules)
      : profile_(std::move(profile)), providers_(providers), rules_(std::move(rules)) {}

  NoisedPair operator()(const Sentence& clean, uint64_t seed, uint64_t index) const {
    RngStream rng(seed, index, StreamTag::kNoise);
    return noise_sentence(clean, profile_, providers_, &rules_, rng);
  }

  const NoiseProfile& profile() const noexcept { return profile_; }
  const Providers& providers() const noexcept { return providers_; }
  const RuleSet& rules() const noexcept { return rules_; }

 private:
  NoiseProfile profile_;
  Providers providers_;
  RuleSet rules_;
};

}  // namespace czgec
