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

// Rule engine for typical Czech errors. Rules are data: a tab-separated table
//
//   rule_id  kind  pattern  replacement[,replacement...]  probability  [case]
//
// scanned in listed order over a sentence. Each matching token fires with the
// rule's probability (one draw per token, at a uniformly chosen site), and a
// token is rewritten by at most one rule.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "czgec/corpus_io.hpp"
#include "czgec/default_rules.hpp"
#include "czgec/error.hpp"
#include "czgec/rng.hpp"
#include "czgec/unicode.hpp"

namespace czgec {

enum class MatchKind {
  kTokenLiteral,          ///< whole token equals the pattern
  kSubstring,             ///< one occurrence of the pattern inside a token
  kPrefix,                ///< token starts with the pattern (and is longer)
  kSentenceBoundaryCase,  ///< sentence-initial capital letter is lowercased
  kPunctuation,           ///< token replaced by a sequence adding/removing punctuation
};

enum class CaseBehavior { kPreserve, kLiteral };

struct TypicalErrorRule {
  std::string rule_id;
  MatchKind kind = MatchKind::kTokenLiteral;
  std::string pattern;
  std::vector<std::string> replacements;
  double probability = 0.05;
  CaseBehavior case_behavior = CaseBehavior::kPreserve;
};

inline constexpr double kDefaultRuleProbability = 0.05;
inline constexpr std::string_view kLowerMarker = "<lower>";
inline constexpr std::string_view kNoneMarker = "<none>";

inline std::string_view to_string(MatchKind k) {
  switch (k) {
    case MatchKind::kTokenLiteral: return "token-literal";
    case MatchKind::kSubstring: return "substring";
    case MatchKind::kPrefix: return "prefix";
    case MatchKind::kSentenceBoundaryCase: return "sentence-boundary-case";
    case MatchKind::kPunctuation: return "punctuation";
  }
  return "?";
}

inline std::optional<MatchKind> parse_match_kind(std::string_view s) {
  for (auto k : {MatchKind::kTokenLiteral, MatchKind::kSubstring, MatchKind::kPrefix,
                 MatchKind::kSentenceBoundaryCase, MatchKind::kPunctuation})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct RuleFiring {
  std::string rule_id;
  std::size_t token_index = 0;
};

namespace detail {

inline std::vector<std::string> non_punct_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text, Tokenization::kWhitespace))
    if (!unicode::is_all_punct(t)) out.push_back(std::move(t));
  return out;
}

inline std::string fold_for(const TypicalErrorRule& r, std::string_view s) {
  return r.case_behavior == CaseBehavior::kPreserve ? unicode::lower(s) : std::string(s);
}

}  // namespace detail

/// Throws Error naming the rule when the rule is unusable.
inline void validate_rule(const TypicalErrorRule& r) {
  auto fail = [&](const std::string& why) {
    throw Error("rule '" + r.rule_id + "': " + why);
  };
  if (r.rule_id.empty()) throw Error("rule with empty rule_id");
  if (!(r.probability >= 0.0 && r.probability <= 1.0))
    fail("probability " + std::to_string(r.probability) + " outside [0,1]");
  if (r.replacements.empty()) fail("no replacements");
  switch (r.kind) {
    case MatchKind::kTokenLiteral:
    case MatchKind::kSubstring:
    case MatchKind::kPrefix:
      if (r.pattern.empty()) fail("empty pattern");
      if (r.pattern.find(' ') != std::string::npos) fail("pattern must not contain spaces");
      for (const auto& rep : r.replacements) {
        if (detail::fold_for(r, rep) == detail::fold_for(r, r.pattern))
          fail("replacement equals the pattern");
        if (rep.find(' ') != std::string::npos) fail("replacement must be a single token");
        if (r.kind == MatchKind::kTokenLiteral && rep.empty())
          fail("token-literal replacement is empty");
      }
      break;
    case MatchKind::kSentenceBoundaryCase:
      for (const auto& rep : r.replacements)
        if (rep != kLowerMarker) fail("sentence-boundary-case replacement must be <lower>");
      break;
    case MatchKind::kPunctuation: {
      if (r.pattern.empty() || r.pattern.find(' ') != std::string::npos)
        fail("punctuation pattern must be a single token");
      const auto base = detail::non_punct_tokens(detail::fold_for(r, r.pattern));
      for (const auto& rep : r.replacements) {
        if (detail::fold_for(r, rep) == detail::fold_for(r, r.pattern))
          fail("replacement equals the pattern");
        if (detail::non_punct_tokens(detail::fold_for(r, rep)) != base)
          fail("punctuation replacement may only add or remove punctuation tokens");
      }
      break;
    }
  }
}

namespace detail {

/// Splits on unescaped commas; "\," and "\\" are escapes.
inline std::vector<std::string> split_replacements(std::string_view field) {
  std::vector<std::string> out(1);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const char c = field[i];
    if (c == '\\' && i + 1 < field.size() && (field[i + 1] == ',' || field[i + 1] == '\\')) {
      out.back().push_back(field[++i]);
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back().push_back(c);
    }
  }
  for (auto& r : out)
    if (r == kNoneMarker) r.clear();
  return out;
}

}  // namespace detail

inline std::vector<TypicalErrorRule> parse_rules(std::istream& in, const std::string& name) {
  std::vector<TypicalErrorRule> rules;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!unicode::is_valid_utf8(line)) throw ParseError(name, line_no, "malformed UTF-8");
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (;;) {
      const auto tab = line.find('\t', pos);
      f.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    const std::string id = f.empty() ? std::string() : f[0];
    auto fail = [&](const std::string& why) {
      throw ParseError(name, line_no, "rule '" + id + "': " + why);
    };
    if (f.size() < 4 || f.size() > 6) fail("expected 4 to 6 tab-separated fields");
    TypicalErrorRule r;
    r.rule_id = id;
    const auto kind = parse_match_kind(f[1]);
    if (!kind) fail("unknown kind '" + f[1] + "'");
    r.kind = *kind;
    r.pattern = unicode::nfc(f[2]);
    for (auto& rep : detail::split_replacements(f[3])) r.replacements.push_back(unicode::nfc(rep));
    r.probability = kDefaultRuleProbability;
    if (f.size() >= 5 && !f[4].empty()) {
      std::size_t used = 0;
      try {
        r.probability = std::stod(f[4], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != f[4].size()) fail("bad probability '" + f[4] + "'");
    }
    if (f.size() == 6) {
      if (f[5] == "preserve") r.case_behavior = CaseBehavior::kPreserve;
      else if (f[5] == "literal") r.case_behavior = CaseBehavior::kLiteral;
      else fail("case behavior must be preserve or literal");
    }
    if (!ids.insert(r.rule_id).second) fail("duplicate rule id");
    try {
      validate_rule(r);
    } catch (const Error& e) {
      throw ParseError(name, line_no, e.what());
    }
    rules.push_back(std::move(r));
  }
  return rules;
}

inline std::vector<TypicalErrorRule> load_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open rule file " + path.string());
  return parse_rules(in, path.string());
}

inline std::vector<TypicalErrorRule> default_czech_rules() {
  std::istringstream in{std::string(kDefaultCzechRules)};
  return parse_rules(in, "<default Czech rules>");
}

namespace detail {

/// Copies the case of `original` onto `replacement` position by position.
inline std::u32string transfer_case(std::u32string_view original, std::u32string replacement) {
  for (std::size_t k = 0; k < replacement.size() && k < original.size(); ++k)
    if (unicode::is_upper(original[k])) replacement[k] = unicode::to_upper(replacement[k]);
  return replacement;
}

inline std::string recase_like(const TypicalErrorRule& r, std::string_view token,
                               std::string_view replacement) {
  if (r.case_behavior == CaseBehavior::kLiteral) return std::string(replacement);
  return unicode::apply_casing(unicode::lower(replacement),
                               unicode::casing_of(unicode::to_u32(token)));
}

/// Set of byte values present in `s`, folded onto 64 bits.
inline uint64_t byte_mask(std::string_view s) {
  uint64_t m = 0;
  for (char c : s) m |= uint64_t{1} << (static_cast<unsigned char>(c) & 63);
  return m;
}

/// Byte-free (code point) occurrences of `needle` in `hay`.
inline std::vector<std::size_t> occurrences(std::u32string_view hay, std::u32string_view needle) {
  std::vector<std::size_t> at;
  if (needle.empty() || needle.size() > hay.size()) return at;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i)
    if (hay.compare(i, needle.size(), needle) == 0) at.push_back(i);
  return at;
}

}  // namespace detail

/// Compiled form of a rule table: patterns pre-decoded for the hot loop.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<TypicalErrorRule> rules) : rules_(std::move(rules)) {
    for (const auto& r : rules_) {
      validate_rule(r);
      Compiled c;
      c.pattern = unicode::to_u32(detail::fold_for(r, r.pattern));
      c.pattern_utf8 = detail::fold_for(r, r.pattern);
      c.byte_mask = detail::byte_mask(c.pattern_utf8);
      for (const auto& rep : r.replacements) {
        c.replacements.push_back(unicode::to_u32(rep));
        c.rep_tokens.push_back(tokenize(rep, Tokenization::kWhitespace));
      }
      compiled_.push_back(std::move(c));
    }
  }

  std::span<const TypicalErrorRule> rules() const noexcept { return rules_; }
  bool empty() const noexcept { return rules_.empty(); }

  /// Rewrites `tokens`. Rules are tried in listed order for every token that
  /// has not been rewritten yet; a matching site fires with the rule's
  /// probability and the first rule to fire claims the token.
  std::vector<std::string> apply(std::span<const std::string> tokens, RngStream& rng,
                                 std::vector<RuleFiring>* log = nullptr) const {
    const std::size_t n = tokens.size();
    std::vector<std::optional<std::vector<std::string>>> rewritten(n);
    if (!rules_.empty() && n > 0) {
      // Folded views are shared by all rules; decoded ones are built on demand.
      std::vector<std::string> folded(n);
      std::vector<std::u32string> folded32(n);
      std::vector<uint64_t> masks(n), folded_masks(n);
      for (std::size_t i = 0; i < n; ++i) {
        folded[i] = unicode::lower(tokens[i]);
        masks[i] = detail::byte_mask(tokens[i]);
        folded_masks[i] = detail::byte_mask(folded[i]);
      }
      for (std::size_t ri = 0; ri < rules_.size(); ++ri) {
        const auto& rule = rules_[ri];
        const auto& c = compiled_[ri];
        for (std::size_t i = 0; i < n; ++i) {
          if (rewritten[i]) continue;
          // A token lacking any byte of the pattern cannot match it.
          const uint64_t have =
              rule.case_behavior == CaseBehavior::kPreserve ? folded_masks[i] : masks[i];
          if (rule.kind != MatchKind::kSentenceBoundaryCase && (c.byte_mask & ~have) != 0)
            continue;
          auto out = try_rule(rule, c, tokens, folded, folded32, i, rng);
          if (!out) continue;
          rewritten[i] = std::move(*out);
          if (log) log->push_back({rule.rule_id, i});
        }
      }
    }
    std::vector<std::string> result;
    result.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
      if (rewritten[i]) {
        for (auto& t : *rewritten[i]) result.push_back(std::move(t));
      } else {
        result.push_back(tokens[i]);
      }
    }
    return result;
  }

 private:
  struct Compiled {
    std::u32string pattern;
    std::string pattern_utf8;
    uint64_t byte_mask = 0;
    std::vector<std::u32string> replacements;
    std::vector<std::vector<std::string>> rep_tokens;
  };

  std::optional<std::vector<std::string>> try_rule(const TypicalErrorRule& rule,
                                                   const Compiled& c,
                                                   std::span<const std::string> tokens,
                                                   std::span<const std::string> folded,
                                                   std::span<std::u32string> folded32,
                                                   std::size_t i, RngStream& rng) const {
    const bool preserve = rule.case_behavior == CaseBehavior::kPreserve;
    const std::string& tok = tokens[i];
    const std::string& key = preserve ? folded[i] : tok;
    switch (rule.kind) {
      case MatchKind::kTokenLiteral: {
        if (key != c.pattern_utf8) return std::nullopt;
        if (!rng.bernoulli(rule.probability)) return std::nullopt;
        const auto& rep = rule.replacements[rng.below(rule.replacements.size())];
        return std::vector<std::string>{detail::recase_like(rule, tok, rep)};
      }
      case MatchKind::kSubstring:
      case MatchKind::kPrefix: {
        if (key.find(c.pattern_utf8) == std::string::npos) return std::nullopt;
        const std::u32string original = preserve ? std::u32string() : unicode::to_u32(tok);
        if (preserve && folded32[i].empty()) folded32[i] = unicode::to_u32(key);
        const std::u32string& hay = preserve ? folded32[i] : original;
        std::vector<std::size_t> sites;
        if (rule.kind == MatchKind::kPrefix) {
          if (hay.size() > c.pattern.size() && hay.compare(0, c.pattern.size(), c.pattern) == 0)
            sites.push_back(0);
        } else {
          sites = detail::occurrences(hay, c.pattern);
        }
        if (sites.empty()) return std::nullopt;
        if (!rng.bernoulli(rule.probability)) return std::nullopt;
        const std::size_t at = sites[rng.below(sites.size())];
        std::u32string rep = c.replacements[rng.below(c.replacements.size())];
        std::u32string out = preserve ? unicode::to_u32(tok) : original;
        if (preserve)
          rep = detail::transfer_case(std::u32string_view(out).substr(at, c.pattern.size()),
                                      std::move(rep));
        out.replace(at, c.pattern.size(), rep);
        if (out.empty()) return std::vector<std::string>{};
        return std::vector<std::string>{unicode::nfc(unicode::to_utf8(out))};
      }
      case MatchKind::kSentenceBoundaryCase: {
        if (i != 0) return std::nullopt;
        std::u32string w = unicode::to_u32(tok);
        auto first = std::find_if(w.begin(), w.end(), unicode::is_alpha);
        if (first == w.end() || !unicode::is_upper(*first)) return std::nullopt;
        if (!rng.bernoulli(rule.probability)) return std::nullopt;
        *first = unicode::to_lower(*first);
        return std::vector<std::string>{unicode::to_utf8(w)};
      }
      case MatchKind::kPunctuation: {
        if (key != c.pattern_utf8) return std::nullopt;
        auto rep_tokens = c.rep_tokens[rng.below(c.rep_tokens.size())];
        // Do not stack punctuation: no insertion at the sentence start or next
        // to an identical mark.
        if (!rep_tokens.empty() && unicode::is_all_punct(rep_tokens.front()) &&
            !unicode::is_all_punct(tok)) {
          if (i == 0 || tokens[i - 1] == rep_tokens.front()) return std::nullopt;
        }
        if (!rep_tokens.empty() && unicode::is_all_punct(rep_tokens.back()) &&
            !unicode::is_all_punct(tok)) {
          if (i + 1 < tokens.size() && tokens[i + 1] == rep_tokens.back()) return std::nullopt;
        }
        if (!rng.bernoulli(rule.probability)) return std::nullopt;
        // The word part keeps the original token's spelling.
        for (auto& t : rep_tokens)
          if (!unicode::is_all_punct(t)) t = tok;
        return rep_tokens;
      }
    }
    return std::nullopt;
  }

  std::vector<TypicalErrorRule> rules_;
  std::vector<Compiled> compiled_;
};

inline Sentence apply_rules(const Sentence& sentence, const RuleSet& rules, RngStream& rng,
                            std::vector<RuleFiring>* log = nullptr) {
  return from_tokens(rules.apply(sentence.tokens, rng, log));
}

}  // namespace czgec
