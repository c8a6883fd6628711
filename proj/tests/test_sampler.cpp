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
#include <set>

#include <gtest/gtest.h>

#include "czgec/sampler.hpp"
#include "support.hpp"

using namespace czgec;
using czgec::testing::TempDir;
using czgec::testing::write_file;

namespace {

constexpr double kChi2Critical3 = 16.2662;  // df 3, alpha 0.001

TEST(DomainWeights, Proportional) {
  const std::vector<std::size_t> sizes = {4, 1};
  const auto w = domain_weights(sizes, 1.0);
  EXPECT_NEAR(w[0], 0.8, 1e-12);
  EXPECT_NEAR(w[1], 0.2, 1e-12);
}

TEST(DomainWeights, UniformAtFactorZero) {
  const std::vector<std::size_t> sizes = {1, 77, 123456, 9};
  for (double x : domain_weights(sizes, 0.0)) EXPECT_DOUBLE_EQ(x, 0.25);
}

TEST(DomainWeights, QuarterPowerOracle) {
  // Reference values from a 30-digit evaluation of size^0.25 / sum.
  const std::vector<std::size_t> sizes = {1000, 100, 10};
  const auto w = domain_weights(sizes, 0.25);
  EXPECT_NEAR(w[0], 0.532320053960533, 1e-12);
  EXPECT_NEAR(w[1], 0.299345564569564, 1e-12);
  EXPECT_NEAR(w[2], 0.168334381469902, 1e-12);
  EXPECT_NEAR(w[0] / w[2], 5.6234132519 / 1.77827941004, 1e-9);
}

TEST(DomainWeights, Errors) {
  EXPECT_THROW(domain_weights(std::vector<std::size_t>{}, 1.0), Error);
  EXPECT_THROW(domain_weights(std::vector<std::size_t>{3, 0}, 1.0), Error);
  EXPECT_THROW(domain_weights(std::vector<std::size_t>{3}, -0.5), Error);
}

TEST(DomainWeights, ScaleInvarianceAndMonotonicity) {
  std::mt19937_64 gen(8);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<std::size_t> sizes(2 + gen() % 5);
    for (auto& s : sizes) s = 1 + gen() % 100000;
    const double factor = static_cast<double>(gen() % 1000) / 500.0;
    const auto w = domain_weights(sizes, factor);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-9);
    for (std::size_t c : {2u, 7u, 1000u}) {
      std::vector<std::size_t> scaled = sizes;
      for (auto& s : scaled) s *= c;
      const auto ws = domain_weights(scaled, factor);
      for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(ws[i], w[i], 1e-12);
    }
    for (std::size_t i = 0; i < sizes.size(); ++i)
      for (std::size_t j = 0; j < sizes.size(); ++j)
        if (factor > 0 && sizes[i] > sizes[j]) {
          EXPECT_GT(w[i], w[j]);
        }
    const std::size_t largest = static_cast<std::size_t>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    double prev = 0;
    for (double f = 0; f <= 2.0; f += 0.125) {
      const double x = domain_weights(sizes, f)[largest];
      EXPECT_GE(x, prev - 1e-12);
      prev = x;
    }
  }
}

TEST(Ratio, Parse) {
  EXPECT_EQ(Ratio::parse("2").num, 2u);
  EXPECT_EQ(Ratio::parse("2").den, 1u);
  const auto a = Ratio::parse("5:2");
  EXPECT_EQ(a.num, 5u);
  EXPECT_EQ(a.den, 2u);
  const auto b = Ratio::parse("2.5");
  EXPECT_EQ(b.num, 5u);
  EXPECT_EQ(b.den, 2u);
  EXPECT_EQ(Ratio::parse("4/2").num, 2u);
  EXPECT_EQ(Ratio::parse("0").num, 0u);
  EXPECT_THROW(Ratio::parse("1:0"), Error);
  EXPECT_THROW(Ratio::parse("-1"), Error);
  EXPECT_THROW(Ratio::parse("x"), Error);
}

/// Writes domains of the given sizes, lines "<id> <n>", and a manifest.
std::vector<DomainCorpus> make_domains(const TempDir& dir, const std::vector<std::size_t>& sizes) {
  std::string manifest;
  for (std::size_t d = 0; d < sizes.size(); ++d) {
    const std::string id = "D" + std::to_string(d);
    std::string body;
    for (std::size_t i = 0; i < sizes[d]; ++i) body += id + " " + std::to_string(i) + "\n";
    write_file(dir / (id + ".txt"), body);
    manifest += id + "\t" + id + ".txt\n";
  }
  write_file(dir / "manifest.tsv", manifest);
  return load_domain_manifest(dir / "manifest.tsv");
}

TEST(DomainStream, EpochVisitsEverySentenceOnce) {
  TempDir dir;
  const auto domains = make_domains(dir, {50});
  for (std::size_t buffer : {1u, 8u, 64u}) {
    DomainStream stream(domains[0], 9, 0, buffer);
    std::vector<std::string> first;
    for (int epoch = 0; epoch < 3; ++epoch) {
      std::set<std::string> seen;
      std::vector<std::string> order;
      for (int i = 0; i < 50; ++i) {
        const auto p = stream.next();
        EXPECT_TRUE(seen.insert(p.source).second) << "repeat within epoch";
        order.push_back(p.source);
      }
      EXPECT_EQ(seen.size(), 50u);
      if (epoch == 0) first = order;
      if (epoch == 1 && buffer > 1) {
        EXPECT_NE(order, first) << "epochs reshuffle";
      }
    }
  }
}

TEST(DomainSampler, FactorZeroGivesEqualShares) {
  TempDir dir;
  MixPlan plan;
  plan.domains = make_domains(dir, {10, 10000});
  plan.factor = 0;
  plan.shuffle_buffer = 256;
  DomainSampler sampler(plan, 1);
  std::map<std::string, int> counts;
  for (int i = 0; i < 100000; ++i) ++counts[sampler.next().domain_id];
  EXPECT_NEAR(counts["D0"] / 100000.0, 0.5, 0.01);
  EXPECT_NEAR(counts["D1"] / 100000.0, 0.5, 0.01);
}

TEST(DomainSampler, ChiSquareAgainstWeights) {
  TempDir dir;
  MixPlan plan;
  plan.domains = make_domains(dir, {3000, 800, 200, 40});
  plan.factor = 0.25;
  DomainSampler sampler(plan, 2);
  std::vector<double> counts(4, 0);
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) counts[sampler.next_domain()] += 1;
  double stat = 0;
  for (std::size_t d = 0; d < 4; ++d) {
    const double e = kDraws * sampler.weights()[d];
    stat += (counts[d] - e) * (counts[d] - e) / e;
  }
  EXPECT_LT(stat, kChi2Critical3);
}

TEST(DomainSampler, LowerFactorFavorsSmallestDomain) {
  TempDir dir;
  MixPlan plan;
  plan.domains = make_domains(dir, {4000, 1500, 600, 150});
  auto share = [&](double factor) {
    plan.factor = factor;
    DomainSampler sampler(plan, 3);
    int small = 0;
    for (int i = 0; i < 50000; ++i) small += sampler.next_domain() == 3;
    return small / 50000.0;
  };
  EXPECT_GT(share(0.25), share(1.0));
}

TEST(DomainSampler, DeterministicInSeed) {
  TempDir dir;
  MixPlan plan;
  plan.domains = make_domains(dir, {30, 20});
  plan.shuffle_buffer = 4;
  DomainSampler a(plan, 5), b(plan, 5), c(plan, 6);
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    const auto x = a.next(), y = b.next(), z = c.next();
    EXPECT_EQ(x.pair.source, y.pair.source);
    differs |= x.pair.source != z.pair.source;
  }
  EXPECT_TRUE(differs);
}

TEST(PairReader, Formats) {
  TempDir dir;
  write_file(dir / "a.tsv", "zdrojová věta\tcílová věta\n");
  write_file(dir / "b.m2", "S Dej mně to\nA 1 2|||Spell|||mě|||REQUIRED|||-NONE-|||0\n\n");
  write_file(dir / "c.txt", "jen věta\n");
  EXPECT_EQ(PairReader(dir / "a.tsv").next()->target, "cílová věta");
  const auto m2 = PairReader(dir / "b.m2").next();
  EXPECT_EQ(m2->source, "Dej mně to");
  EXPECT_EQ(m2->target, "Dej mě to");
  const auto plain = PairReader(dir / "c.txt").next();
  EXPECT_EQ(plain->source, plain->target);
}

MixedStream<int> counting_mix(Ratio r, int* syn, int* gold) {
  return mix_streams<int>([syn]() -> std::optional<int> { return (*syn)++; },
                          [gold]() -> std::optional<int> { return 1000000 + (*gold)++; }, r);
}

TEST(MixStreams, RatioZeroIsGoldStream) {
  int syn = 0, gold = 0;
  auto mix = counting_mix(Ratio::parse("0"), &syn, &gold);
  for (int i = 0; i < 100; ++i) {
    auto item = mix.next();
    ASSERT_TRUE(item);
    EXPECT_FALSE(item->synthetic);
    EXPECT_EQ(item->value, 1000000 + i);
  }
  EXPECT_EQ(syn, 0);
}

TEST(MixStreams, IntegerRatiosRepeatBlocks) {
  for (uint64_t r : {1u, 2u, 5u}) {
    int syn = 0, gold = 0;
    auto mix = counting_mix(Ratio{r, 1}, &syn, &gold);
    std::vector<bool> pattern;
    for (int i = 0; i < 600; ++i) pattern.push_back(mix.next()->synthetic);
    for (std::size_t start = 0; start + r + 1 <= pattern.size(); start += r + 1) {
      int golds = 0;
      for (std::size_t k = start; k < start + r + 1; ++k) golds += !pattern[k];
      EXPECT_EQ(golds, 1);
    }
    // Sliding windows too.
    for (std::size_t start = 0; start + r + 1 <= pattern.size(); ++start) {
      int golds = 0;
      for (std::size_t k = start; k < start + r + 1; ++k) golds += !pattern[k];
      EXPECT_EQ(golds, 1) << "r=" << r << " start=" << start;
    }
    if (r == 2) {
      EXPECT_TRUE(pattern[0] && pattern[1] && !pattern[2]);
    }
  }
}

TEST(MixStreams, FractionalRatio) {
  int syn = 0, gold = 0;
  auto mix = counting_mix(Ratio::parse("5:2"), &syn, &gold);
  for (int i = 0; i < 700; ++i) mix.next();
  EXPECT_EQ(syn, 500);
  EXPECT_EQ(gold, 200);
}

TEST(MixStreams, ExhaustionAndEmpty) {
  int n = 0;
  auto mix = mix_streams<int>([&]() -> std::optional<int> {
    if (n >= 3) return std::nullopt;
    return n++;
  }, []() -> std::optional<int> { return std::nullopt; }, Ratio{1, 1});
  int count = 0;
  while (mix.next()) ++count;
  EXPECT_EQ(count, 3);
  auto empty = mix_streams<int>([]() -> std::optional<int> { return std::nullopt; },
                                []() -> std::optional<int> { return std::nullopt; }, Ratio{2, 1});
  EXPECT_FALSE(empty.next());
}

}  // namespace
