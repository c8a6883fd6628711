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

#include <map>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "czgec/noise.hpp"
#include "support.hpp"

using namespace czgec;
using Tokens = std::vector<std::string>;

namespace {

// Mean of clamp(N(0.15, 0.2), 0, 1), by numeric integration.
constexpr double kClampedNormalMean = 0.17623292509403;

// Upper 0.001 quantiles of the chi-square distribution.
constexpr double kChi2Critical[] = {0, 0, 13.8155, 16.2662, 18.4668, 20.5150};

double chi_square(const std::vector<double>& observed, const std::vector<double>& probs) {
  double total = 0;
  for (double o : observed) total += o;
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (probs[i] == 0) continue;
    const double e = total * probs[i];
    stat += (observed[i] - e) * (observed[i] - e) / e;
  }
  return stat;
}

struct Fixture {
  std::vector<std::string> words = czgec::testing::synthetic_words(3000, 21);
  Lexicon lexicon;
  MorphLexicon morph;
  InsertionVocabulary insertions;
  Providers providers;

  Fixture() {
    std::vector<std::pair<std::string, double>> entries;
    std::vector<std::pair<std::string, std::string>> pairs;
    static const char* endings[] = {"a", "y", "u", "ou"};
    for (std::size_t i = 0; i < words.size(); ++i) {
      entries.emplace_back(words[i], 1000.0 / static_cast<double>(i + 1));
      for (const char* e : endings) pairs.emplace_back(words[i] + e, words[i]);
      pairs.emplace_back(words[i], words[i]);
    }
    lexicon = Lexicon(entries);
    morph = MorphLexicon(pairs);
    insertions = InsertionVocabulary::from_lexicon(lexicon);
    providers = {&lexicon, &morph, &insertions, &DiacriticsTable::czech()};
  }

  Sentence sentence(std::size_t len, std::size_t salt) const {
    Tokens toks;
    for (std::size_t t = 0; t < len; ++t) toks.push_back(words[(salt * 31 + t * 7) % words.size()]);
    return from_tokens(toks);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

TEST(ChiSquareTable, MatchesBoost) {
  for (int df = 2; df <= 5; ++df) {
    boost::math::chi_squared dist(df);
    EXPECT_NEAR(boost::math::quantile(boost::math::complement(dist, 0.001)), kChi2Critical[df],
                1e-3);
  }
}

TEST(SampleErrorCount, DegenerateCases) {
  RngStream rng(1, 0, StreamTag::kNoise);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_error_count(10, 0.0, 0.0, rng), 0u);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_error_count(4, 0.5, 0.0, rng), 2u);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_error_count(7, 3.0, 0.0, rng), 7u);
  for (int i = 0; i < 1000; ++i) EXPECT_LE(sample_error_count(5, 0.5, 2.0, rng), 5u);
}

TEST(SampleErrorCount, MonteCarloMatchesClampedNormalMean) {
  RngStream rng(2024, 0, StreamTag::kNoise);
  double sum = 0;
  constexpr int kDraws = 1000000;
  for (int i = 0; i < kDraws; ++i) sum += static_cast<double>(sample_error_count(20, 0.15, 0.2, rng));
  EXPECT_NEAR(sum / kDraws / 20.0, kClampedNormalMean, 1e-2);
}

TEST(CharOp, SwapTwoLetters) {
  RngStream rng(1, 1, StreamTag::kNoise);
  EXPECT_EQ(apply_char_op("ab", CharOp::kSwap, rng).word, "ba");
  const auto r = apply_char_op("aa", CharOp::kSwap, rng);
  EXPECT_EQ(r.status, OpStatus::kSkipped);
  EXPECT_EQ(r.word, "aa");
}

TEST(CharOp, DiacriticsOnDeti) {
  // "děti" has variants at d, ě, t, i. Find a draw that hits ě → e.
  bool saw_deti = false;
  for (uint64_t idx = 0; idx < 200 && !saw_deti; ++idx) {
    RngStream rng(3, idx, StreamTag::kNoise);
    const auto r = apply_char_op("děti", CharOp::kDiacritics, rng);
    EXPECT_EQ(r.status, OpStatus::kApplied);
    EXPECT_EQ(DiacriticsTable::czech().fold(r.word), "deti");
    EXPECT_NE(r.word, "děti");
    saw_deti |= r.word == "deti";
  }
  EXPECT_TRUE(saw_deti);
  RngStream rng(3, 0, StreamTag::kNoise);
  EXPECT_EQ(apply_char_op("xwq", CharOp::kDiacritics, rng).status, OpStatus::kSkipped);
}

TEST(CharOp, DeleteSingleLetterGivesEmpty) {
  RngStream rng(1, 2, StreamTag::kNoise);
  EXPECT_EQ(apply_char_op("a", CharOp::kDelete, rng).word, "");
}

TEST(CharOp, LengthProperties) {
  const auto& words = fixture().words;
  for (uint64_t i = 0; i < 3000; ++i) {
    RngStream rng(9, i, StreamTag::kNoise);
    const std::string& w = words[i % words.size()];
    const std::size_t n = unicode::length(w);
    const auto op = static_cast<CharOp>(i % kCharOpCount);
    const auto r = apply_char_op(w, op, rng);
    ASSERT_TRUE(unicode::is_valid_utf8(r.word));
    ASSERT_TRUE(unicode::is_nfc(r.word));
    switch (op) {
      case CharOp::kInsert: EXPECT_EQ(unicode::length(r.word), n + 1); break;
      case CharOp::kDelete: EXPECT_EQ(unicode::length(r.word), n - 1); break;
      case CharOp::kDiacritics:
        if (r.status == OpStatus::kApplied) {
          EXPECT_EQ(DiacriticsTable::czech().fold(r.word), DiacriticsTable::czech().fold(w));
        }
        [[fallthrough]];
      default:
        EXPECT_EQ(unicode::length(r.word), n);
    }
  }
}

TEST(CharOp, SubstitutionKeepsCase) {
  for (uint64_t i = 0; i < 200; ++i) {
    RngStream rng(4, i, StreamTag::kNoise);
    const auto r = apply_char_op("A", CharOp::kSubstitute, rng);
    ASSERT_EQ(unicode::length(r.word), 1u);
    EXPECT_NE(r.word, "A");
    EXPECT_EQ(unicode::casing_of(unicode::to_u32(r.word)), unicode::Casing::kCapitalized);
  }
}

TEST(TokenOp, RecaseAndSwap) {
  RngStream rng(1, 0, StreamTag::kNoise);
  const Providers none{};
  EXPECT_EQ(apply_token_op(from_tokens({"Jdu", "domů"}), 0, TokenOp::kRecase, none, rng).tokens,
            (Tokens{"jdu", "domů"}));
  EXPECT_EQ(apply_token_op(from_tokens({"jdu", "domů"}), 0, TokenOp::kRecase, none, rng).tokens,
            (Tokens{"Jdu", "domů"}));
  EXPECT_EQ(apply_token_op(from_tokens({"JDU"}), 0, TokenOp::kRecase, none, rng).tokens,
            (Tokens{"jdu"}));
  EXPECT_EQ(apply_token_op(from_tokens({"a", "b", "c"}), 0, TokenOp::kSwap, none, rng).tokens,
            (Tokens{"b", "a", "c"}));
  EXPECT_EQ(apply_token_op(from_tokens({"a", "b", "c"}), 2, TokenOp::kSwap, none, rng).tokens,
            (Tokens{"a", "c", "b"}));
  EXPECT_EQ(apply_token_op(from_tokens({"a", "b", "c"}), 1, TokenOp::kDelete, none, rng).tokens,
            (Tokens{"a", "c"}));
}

TEST(TokenOp, SubMorphUsesLexicon) {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"pes", "pes"}, {"psi", "pes"}, {"psů", "pes"}, {"psa", "pes"}};
  const MorphLexicon morph(pairs);
  Providers p;
  p.morph = &morph;
  for (uint64_t i = 0; i < 50; ++i) {
    RngStream rng(5, i, StreamTag::kNoise);
    OpStatus status;
    const auto out =
        apply_token_op(from_tokens({"Psi", "štěkají"}), 0, TokenOp::kSubMorph, p, rng, &status);
    EXPECT_EQ(status, OpStatus::kApplied);
    const auto forms = morph_forms("Psi", morph);
    EXPECT_NE(out.tokens[0], "Psi");
    EXPECT_NE(std::find(forms.begin(), forms.end(), out.tokens[0]), forms.end());
    EXPECT_EQ(out.tokens[1], "štěkají");
  }
}

TEST(TokenOp, MissingProviderSkips) {
  RngStream rng(1, 0, StreamTag::kNoise);
  OpStatus status;
  const Sentence s = from_tokens({"Psi", "štěkají"});
  EXPECT_EQ(apply_token_op(s, 0, TokenOp::kSubMorph, Providers{}, rng, &status), s);
  EXPECT_EQ(status, OpStatus::kSkipped);
  EXPECT_EQ(apply_token_op(s, 0, TokenOp::kSubAspell, Providers{}, rng, &status), s);
  EXPECT_EQ(status, OpStatus::kSkipped);
}

TEST(TokenOp, SubAspellPicksDictionaryNeighbor) {
  const auto& f = fixture();
  for (uint64_t i = 0; i < 200; ++i) {
    RngStream rng(6, i, StreamTag::kNoise);
    const std::string w = f.words[i];
    OpStatus status;
    const auto out = apply_token_op(from_tokens({w}), 0, TokenOp::kSubAspell, f.providers, rng, &status);
    if (status == OpStatus::kSkipped) continue;
    EXPECT_TRUE(f.lexicon.contains(out.tokens[0]));
    EXPECT_LE(osa_distance(unicode::to_u32(out.tokens[0]), unicode::to_u32(w)), 2);
  }
}

TEST(NoiseSentence, IdentityProfile) {
  const auto& f = fixture();
  NoiseProfile p;
  p.char_pass.rate_mean = p.char_pass.rate_std = 0;
  p.token_pass.rate_mean = p.token_pass.rate_std = 0;
  const RuleSet rules(default_czech_rules());
  const Noiser noiser(p, f.providers, rules);
  for (uint64_t i = 0; i < 500; ++i) {
    const Sentence s = f.sentence(12, i);
    const auto out = noiser(s, 7, i);
    EXPECT_EQ(out.noisy.text(), s.text());
    EXPECT_EQ(out.clean.text(), s.text());
  }
}

TEST(NoiseSentence, DeterministicAndCleanSideUntouched) {
  const auto& f = fixture();
  const RuleSet rules(default_czech_rules());
  const Noiser noiser(preset_profile(NoisePreset::kMate), f.providers, rules);
  for (uint64_t i = 0; i < 300; ++i) {
    const Sentence s = f.sentence(20, i);
    const auto a = noiser(s, 42, i);
    const auto b = noiser(s, 42, i);
    EXPECT_EQ(a.noisy.tokens, b.noisy.tokens);
    EXPECT_EQ(a.clean.raw, s.raw);
    EXPECT_TRUE(unicode::is_valid_utf8(a.noisy.text()));
    EXPECT_TRUE(unicode::is_nfc(a.noisy.text()));
    for (const auto& t : a.noisy.tokens) EXPECT_FALSE(t.empty());
  }
}

TEST(NoiseSentence, MateOpFrequencies) {
  const auto& f = fixture();
  const RuleSet rules(default_czech_rules());
  const NoiseProfile p = preset_profile(NoisePreset::kMate);
  const Noiser noiser(p, f.providers, rules);
  std::vector<double> counts(kTokenOpCount, 0);
  std::size_t draws = 0;
  for (uint64_t i = 0; draws < 100000; ++i) {
    for (const auto& op : noiser(f.sentence(20, i), 1, i).ops) {
      if (op.pass != Pass::kToken) continue;
      counts[op.op] += 1;
      ++draws;
    }
  }
  for (std::size_t k = 0; k < kTokenOpCount; ++k)
    EXPECT_NEAR(counts[k] / static_cast<double>(draws), p.token_pass.op_weights[k], 0.01)
        << kTokenOpNames[k];
}

TEST(NoiseSentence, TokenOpChiSquare) {
  const auto& f = fixture();
  NoiseProfile p = preset_profile(NoisePreset::kMate);
  p.char_pass.rate_mean = p.char_pass.rate_std = 0;
  p.token_pass.rate_mean = 0.05;  // exactly one op on 20 tokens
  p.token_pass.rate_std = 0;
  p.typical_errors_enabled = false;
  const Noiser noiser(p, f.providers, RuleSet{});
  std::vector<double> counts(kTokenOpCount, 0);
  for (uint64_t i = 0; i < 100000; ++i) {
    const auto ops = noiser(f.sentence(20, i), 3, i).ops;
    ASSERT_EQ(ops.size(), 1u);
    counts[ops[0].op] += 1;
  }
  const std::vector<double> probs(p.token_pass.op_weights.begin(), p.token_pass.op_weights.end());
  // sub_morph has weight 0.2 here, so all six cells count: 5 degrees of freedom.
  EXPECT_LT(chi_square(counts, probs), kChi2Critical[5]);
}

TEST(NoiseSentence, CharOpChiSquare) {
  const auto& f = fixture();
  NoiseProfile p;
  p.char_pass.rate_mean = 0.05;
  p.char_pass.rate_std = 0;
  p.token_pass.rate_mean = p.token_pass.rate_std = 0;
  const Noiser noiser(p, f.providers, RuleSet{});
  std::vector<double> counts(kCharOpCount, 0);
  for (uint64_t i = 0; i < 100000; ++i) {
    const auto ops = noiser(f.sentence(20, i), 4, i).ops;
    ASSERT_EQ(ops.size(), 1u);
    counts[ops[0].op] += 1;
  }
  EXPECT_LT(chi_square(counts, std::vector<double>(kCharOpCount, 0.2)), kChi2Critical[4]);
}

TEST(NoiseSentence, DiacriticsOnlyPreservesSkeleton) {
  const auto& f = fixture();
  NoiseProfile p;
  p.char_pass = {0.5, 0.3, {0, 0, 0, 0, 1}};
  p.token_pass.rate_mean = p.token_pass.rate_std = 0;
  p.normalize();
  const Noiser noiser(p, f.providers, RuleSet{});
  const auto& table = DiacriticsTable::czech();
  for (uint64_t i = 0; i < 500; ++i) {
    const Sentence s = f.sentence(15, i);
    EXPECT_EQ(table.fold(noiser(s, 8, i).noisy.text()), table.fold(s.text()));
  }
}

TEST(NoiseSentence, AspellPresetNeverDrawsSubMorph) {
  const auto& f = fixture();
  const Noiser noiser(preset_profile(NoisePreset::kAspell), f.providers, RuleSet{});
  for (uint64_t i = 0; i < 5000; ++i)
    for (const auto& op : noiser(f.sentence(20, i), 5, i).ops)
      EXPECT_FALSE(op.pass == Pass::kToken && op.op == 1);
}

TEST(Presets, MatchTable) {
  using W = std::array<double, kTokenOpCount>;
  const W aspell{0.7, 0.0, 0.1, 0.05, 0.1, 0.05};
  const W morph{0.5, 0.2, 0.1, 0.05, 0.1, 0.05};
  EXPECT_EQ(preset_profile(NoisePreset::kAspell).token_pass.op_weights, aspell);
  EXPECT_FALSE(preset_profile(NoisePreset::kAspell).typical_errors_enabled);
  EXPECT_EQ(preset_profile(NoisePreset::kMorphoDiTa).token_pass.op_weights, morph);
  EXPECT_FALSE(preset_profile(NoisePreset::kMorphoDiTa).typical_errors_enabled);
  EXPECT_EQ(preset_profile(NoisePreset::kTypicalErrors).token_pass.op_weights, aspell);
  EXPECT_TRUE(preset_profile(NoisePreset::kTypicalErrors).typical_errors_enabled);
  EXPECT_EQ(preset_profile(NoisePreset::kMate).token_pass.op_weights, morph);
  EXPECT_TRUE(preset_profile(NoisePreset::kMate).typical_errors_enabled);
  EXPECT_EQ(parse_preset("MATE"), NoisePreset::kMate);
  EXPECT_EQ(parse_preset("morphodita"), NoisePreset::kMorphoDiTa);
  EXPECT_EQ(parse_preset("nope"), std::nullopt);
}

TEST(Profile, ParseRoundTrip) {
  std::istringstream in(
      "preset = aspell\n"
      "char.rate_mean = 0.05  # more typos\n"
      "token.op_weights = 1 1 0 0 0 0\n"
      "typical_errors = true\n"
      "top_k = 3\n");
  NoiseProfile p = parse_profile(in);
  EXPECT_DOUBLE_EQ(p.char_pass.rate_mean, 0.05);
  EXPECT_DOUBLE_EQ(p.token_pass.op_weights[0], 0.5);
  EXPECT_DOUBLE_EQ(p.token_pass.op_weights[1], 0.5);
  EXPECT_TRUE(p.typical_errors_enabled);
  EXPECT_EQ(p.top_k, 3u);
  std::istringstream again(format_profile(p));
  const NoiseProfile q = parse_profile(again);
  EXPECT_EQ(q.token_pass.op_weights, p.token_pass.op_weights);
  EXPECT_DOUBLE_EQ(q.char_pass.rate_mean, p.char_pass.rate_mean);
  EXPECT_EQ(q.top_k, p.top_k);
}

TEST(Profile, Errors) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_profile(in);
  };
  EXPECT_THROW(parse("char.rate_mean = -1\n"), Error);
  EXPECT_THROW(parse("token.op_weights = 0 0 0 0 0 0\n"), Error);
  EXPECT_THROW(parse("token.op_weights = 1 2\n"), Error);
  EXPECT_THROW(parse("bogus = 1\n"), ParseError);
  EXPECT_THROW(parse("preset = nope\n"), ParseError);
  EXPECT_THROW(parse("no equals sign\n"), ParseError);
  std::vector<std::string> warnings;
  std::istringstream in("token.rate_mean = 1.5\n");
  parse_profile(in, "p", {}, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
}

}  // namespace
