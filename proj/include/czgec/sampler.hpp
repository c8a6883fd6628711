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

// Domain-balanced sampling and synthetic/gold interleaving.
//
// Each domain is drawn i.i.d. with probability proportional to
// size^factor; factor 1 keeps corpus proportions, factor 0 is uniform.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "czgec/corpus_io.hpp"
#include "czgec/error.hpp"
#include "czgec/rng.hpp"

namespace czgec {

/// size_i^factor / sum_j size_j^factor. Every size must be positive.
inline std::vector<double> domain_weights(std::span<const std::size_t> sizes, double factor) {
  if (sizes.empty()) throw Error("no domains to weight");
  if (!(factor >= 0)) throw Error("oversampling factor must be non-negative");
  std::vector<double> w;
  w.reserve(sizes.size());
  for (std::size_t s : sizes) {
    if (s == 0) throw Error("domain of size 0 cannot be weighted; drop it first");
    w.push_back(factor == 0 ? 1.0 : std::pow(static_cast<double>(s), factor));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

/// Non-negative rational synthetic:gold ratio.
struct Ratio {
  uint64_t num = 0;
  uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// Accepts "r", "p:q", "p/q" or a decimal such as "2.5".
  static Ratio parse(std::string_view s) {
    auto bad = [&] { return Error("bad ratio '" + std::string(s) + "'"); };
    auto parse_u = [&](std::string_view t) {
      uint64_t v = 0;
      if (t.empty() || !detail::parse_int(t, v)) throw bad();
      return v;
    };
    Ratio r;
    const auto sep = s.find_first_of(":/");
    if (sep != std::string_view::npos) {
      r.num = parse_u(s.substr(0, sep));
      r.den = parse_u(s.substr(sep + 1));
    } else if (const auto dot = s.find('.'); dot != std::string_view::npos) {
      const auto frac = s.substr(dot + 1);
      if (frac.size() > 9) throw bad();
      r.den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) r.den *= 10;
      const uint64_t whole = dot == 0 ? 0 : parse_u(s.substr(0, dot));
      r.num = whole * r.den + (frac.empty() ? 0 : parse_u(frac));
    } else {
      r.num = parse_u(s);
    }
    if (r.den == 0) throw bad();
    const uint64_t g = std::gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
    return r;
  }
};

struct MixPlan {
  std::vector<DomainCorpus> domains;
  double factor = 1.0;
  Ratio synthetic_ratio{};
  std::size_t shuffle_buffer = 65536;

  void validate() const {
    if (!(factor >= 0)) throw Error("factor must be non-negative");
    if (shuffle_buffer < 1) throw Error("shuffle buffer must hold at least one sentence");
  }

  std::vector<double> weights() const {
    std::vector<std::size_t> sizes;
    for (const auto& d : domains) sizes.push_back(d.size);
    return domain_weights(sizes, factor);
  }
};

/// Sequential reader of (source, target) pairs from a corpus file: M2 blocks
/// (target = source corrected by the lowest annotator id), "source<TAB>target"
/// lines, or plain lines (paired with themselves).
class PairReader {
 public:
  explicit PairReader(std::filesystem::path path)
      : path_(std::move(path)), m2_(is_m2_path(path_)), in_(path_, std::ios::binary) {
    if (!in_) throw Error("cannot open " + path_.string());
  }

  std::optional<TextPair> next() {
    return m2_ ? next_m2() : next_line();
  }

 private:
  std::optional<TextPair> next_line() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      if (!unicode::is_valid_utf8(line)) throw ParseError(path_.string(), line_, "malformed UTF-8");
      try {
        TextPair p = split_pair(line);
        p.source = unicode::nfc(p.source);
        p.target = unicode::nfc(p.target);
        return p;
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(path_.string(), line_, e.what());
      }
    }
    return std::nullopt;
  }

  std::optional<TextPair> next_m2() {
    std::string block, line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) {
        if (!block.empty()) break;
        continue;
      }
      block += line;
      block += '\n';
    }
    if (block.empty()) return std::nullopt;
    std::istringstream bin(block);
    auto blocks = parse_m2(bin, path_.string());
    if (blocks.size() != 1) throw ParseError(path_.string(), line_, "expected one M2 block");
    const auto& b = blocks.front();
    const auto ids = b.annotators();
    const auto gold = ids.empty() ? std::vector<GoldAnnotation>{} : b.by_annotator(ids.front());
    return TextPair{b.source.text(), from_tokens(apply_gold(b.source, gold)).text()};
  }

  std::filesystem::path path_;
  bool m2_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

/// Endless stream over one domain. Every epoch visits each item exactly once
/// in an order shuffled through a bounded buffer; the buffer drains before the
/// next epoch starts, so epochs never interleave.
class DomainStream {
 public:
  DomainStream(DomainCorpus corpus, uint64_t seed, uint64_t stream_id,
               std::size_t buffer_size = 65536)
      : corpus_(std::move(corpus)), seed_(seed), stream_id_(stream_id), capacity_(buffer_size) {
    if (capacity_ < 1) throw Error("shuffle buffer must hold at least one sentence");
    start_epoch();
  }

  TextPair next() {
    if (buffer_.empty()) {
      start_epoch();
      if (buffer_.empty()) throw Error("domain '" + corpus_.domain_id + "' has no sentences");
    }
    const std::size_t i = rng_->below(buffer_.size());
    TextPair out = std::move(buffer_[i]);
    if (auto more = read()) {
      buffer_[i] = std::move(*more);
    } else {
      buffer_[i] = std::move(buffer_.back());
      buffer_.pop_back();
    }
    return out;
  }

  const DomainCorpus& corpus() const noexcept { return corpus_; }
  uint64_t epoch() const noexcept { return epoch_; }

 private:
  std::optional<TextPair> read() {
    try {
      return reader_->next();
    } catch (const Error& e) {
      throw Error("domain '" + corpus_.domain_id + "': " + e.what());
    }
  }

  void start_epoch() {
    ++epoch_;
    reader_.emplace(corpus_.path);
    rng_.emplace(seed_ ^ splitmix64(stream_id_), epoch_, StreamTag::kShuffle);
    buffer_.clear();
    while (buffer_.size() < capacity_) {
      auto p = read();
      if (!p) break;
      buffer_.push_back(std::move(*p));
    }
  }

  DomainCorpus corpus_;
  uint64_t seed_;
  uint64_t stream_id_;
  std::size_t capacity_;
  uint64_t epoch_ = 0;
  std::optional<PairReader> reader_;
  std::optional<RngStream> rng_;
  std::vector<TextPair> buffer_;
};

struct DomainItem {
  std::string domain_id;
  TextPair pair;
};

/// Endless i.i.d. domain draws by size^factor weight.
class DomainSampler {
 public:
  DomainSampler(const MixPlan& plan, uint64_t seed)
      : weights_(plan.weights()), choice_(seed, 0, StreamTag::kDomainChoice) {
    plan.validate();
    for (std::size_t i = 0; i < plan.domains.size(); ++i)
      streams_.emplace_back(plan.domains[i], seed, i, plan.shuffle_buffer);
  }

  std::size_t next_domain() { return choice_.weighted(weights_); }

  DomainItem next() {
    const std::size_t d = next_domain();
    return {streams_[d].corpus().domain_id, streams_[d].next()};
  }

  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<double> weights_;
  RngStream choice_;
  std::vector<DomainStream> streams_;
};

template <typename T>
struct MixItem {
  T value;
  bool synthetic = false;
};

/// Deterministic interleave of a synthetic and a gold stream at r:1. Uses an
/// integer accumulator, so r = p/q emits exactly p synthetic items per q gold
/// ones and an integer r yields the repeating block of r synthetic + 1 gold.
/// When one side runs dry the other continues alone.
template <typename T>
class MixedStream {
 public:
  using Source = std::function<std::optional<T>()>;

  MixedStream(Source synthetic, Source gold, Ratio ratio)
      : synthetic_(std::move(synthetic)), gold_(std::move(gold)), ratio_(ratio),
        credit_(ratio.num) {
    if (ratio_.den == 0) throw Error("ratio denominator is zero");
  }

  std::optional<MixItem<T>> next() {
    const bool want_synthetic = ratio_.num > 0 && credit_ >= ratio_.den;
    if (want_synthetic) {
      if (auto v = pull(synthetic_, synthetic_done_)) {
        credit_ -= ratio_.den;
        return MixItem<T>{std::move(*v), true};
      }
    } else if (auto v = pull(gold_, gold_done_)) {
      credit_ += ratio_.num;
      return MixItem<T>{std::move(*v), false};
    }
    // Preferred side exhausted.
    if (want_synthetic) {
      if (auto v = pull(gold_, gold_done_)) return MixItem<T>{std::move(*v), false};
    } else if (ratio_.num > 0) {
      if (auto v = pull(synthetic_, synthetic_done_)) return MixItem<T>{std::move(*v), true};
    }
    return std::nullopt;
  }

 private:
  static std::optional<T> pull(Source& s, bool& done) {
    if (done || !s) return std::nullopt;
    auto v = s();
    if (!v) done = true;
    return v;
  }

  Source synthetic_;
  Source gold_;
  Ratio ratio_;
  uint64_t credit_;
  bool synthetic_done_ = false;
  bool gold_done_ = false;
};

template <typename T>
MixedStream<T> mix_streams(typename MixedStream<T>::Source synthetic,
                           typename MixedStream<T>::Source gold, Ratio ratio) {
  return MixedStream<T>(std::move(synthetic), std::move(gold), ratio);
}

}  // namespace czgec
