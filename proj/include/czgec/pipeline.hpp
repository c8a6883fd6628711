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

// Streaming generation of "noisy<TAB>clean" pairs. Sentences are read in
// fixed-size batches, noised by a worker pool (sentence i always uses the
// random stream (seed, i)), and written back in input order, so the output
// does not depend on the worker count.

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "czgec/corpus_io.hpp"
#include "czgec/error.hpp"
#include "czgec/noise.hpp"

namespace czgec {

struct GenerateOptions {
  uint64_t seed = 42;
  unsigned workers = 1;
  std::size_t batch_size = 4096;
};

/// Writes one op-log line per drawn operation:
/// sentence_index<TAB>pass<TAB>op<TAB>token_index<TAB>applied|skipped
inline void write_op_log(std::ostream& out, uint64_t sentence_index,
                         std::span<const OpRecord> ops) {
  for (const auto& op : ops)
    out << sentence_index << '\t' << to_string(op.pass) << '\t' << op.name() << '\t'
        << op.token_index << '\t' << (op.status == OpStatus::kApplied ? "applied" : "skipped")
        << '\n';
}

/// Noises every sentence from `reader`; returns the number of sentences.
inline std::size_t generate(SentenceReader& reader, const Noiser& noiser,
                            const GenerateOptions& opt, std::ostream& out,
                            std::ostream* op_log = nullptr) {
  const unsigned workers = std::max(1u, opt.workers);
  const std::size_t batch_size = std::max<std::size_t>(1, opt.batch_size);
  std::vector<Sentence> batch;
  std::vector<NoisedPair> results;
  uint64_t base = 0;
  for (;;) {
    batch.clear();
    while (batch.size() < batch_size) {
      auto s = reader.next();
      if (!s) break;
      batch.push_back(std::move(*s));
    }
    if (batch.empty()) break;
    results.assign(batch.size(), {});
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t i = begin; i < batch.size(); i += stride)
        results[i] = noiser(batch[i], opt.seed, base + i);
    };
    if (workers == 1 || batch.size() == 1) {
      work(0, 1);
    } else {
      std::vector<std::jthread> pool;
      const unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, batch.size()));
      for (unsigned w = 0; w < n; ++w) pool.emplace_back(work, w, n);
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
      write_pair(out, results[i].noisy.text(), results[i].clean.text());
      if (op_log) write_op_log(*op_log, base + i, results[i].ops);
    }
    if (!out) throw Error("write error on output stream");
    base += batch.size();
  }
  return base;
}

struct OpCount {
  std::size_t drawn = 0;
  std::size_t applied = 0;
};

/// Per-pass operation counts read back from an op log.
struct OpStats {
  std::array<OpCount, kCharOpCount> char_ops{};
  std::array<OpCount, kTokenOpCount> token_ops{};
  std::map<std::string, std::size_t> rule_firings;

  std::size_t char_draws() const {
    std::size_t n = 0;
    for (const auto& c : char_ops) n += c.drawn;
    return n;
  }
  std::size_t token_draws() const {
    std::size_t n = 0;
    for (const auto& c : token_ops) n += c.drawn;
    return n;
  }
  std::size_t typical_firings() const {
    std::size_t n = 0;
    for (const auto& [_, c] : rule_firings) n += c;
    return n;
  }

  /// Fraction of token-pass draws per op, in kTokenOpNames order.
  std::array<double, kTokenOpCount> token_frequencies() const {
    std::array<double, kTokenOpCount> f{};
    const double total = static_cast<double>(token_draws());
    for (std::size_t i = 0; i < kTokenOpCount; ++i)
      f[i] = total > 0 ? static_cast<double>(token_ops[i].drawn) / total : 0.0;
    return f;
  }
  std::array<double, kCharOpCount> char_frequencies() const {
    std::array<double, kCharOpCount> f{};
    const double total = static_cast<double>(char_draws());
    for (std::size_t i = 0; i < kCharOpCount; ++i)
      f[i] = total > 0 ? static_cast<double>(char_ops[i].drawn) / total : 0.0;
    return f;
  }

  void add(const OpRecord& r) {
    const bool applied = r.status == OpStatus::kApplied;
    switch (r.pass) {
      case Pass::kChar:
        ++char_ops[r.op].drawn;
        char_ops[r.op].applied += applied;
        break;
      case Pass::kToken:
        ++token_ops[r.op].drawn;
        token_ops[r.op].applied += applied;
        break;
      case Pass::kTypical:
        ++rule_firings[r.rule_id];
        break;
    }
  }
};

inline OpStats read_op_log(std::istream& in, const std::string& name = "<ops>") {
  OpStats stats;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (;;) {
      const auto tab = line.find('\t', pos);
      f.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (f.size() != 5) throw ParseError(name, line_no, "expected 5 tab-separated fields");
    OpRecord r;
    r.status = f[4] == "applied" ? OpStatus::kApplied : OpStatus::kSkipped;
    if (f[4] != "applied" && f[4] != "skipped") throw ParseError(name, line_no, "bad status");
    if (f[1] == "char") {
      r.pass = Pass::kChar;
      auto it = std::find(kCharOpNames.begin(), kCharOpNames.end(), f[2]);
      if (it == kCharOpNames.end()) throw ParseError(name, line_no, "unknown char op " + f[2]);
      r.op = static_cast<std::size_t>(it - kCharOpNames.begin());
    } else if (f[1] == "token") {
      r.pass = Pass::kToken;
      auto it = std::find(kTokenOpNames.begin(), kTokenOpNames.end(), f[2]);
      if (it == kTokenOpNames.end()) throw ParseError(name, line_no, "unknown token op " + f[2]);
      r.op = static_cast<std::size_t>(it - kTokenOpNames.begin());
    } else if (f[1] == "typical") {
      r.pass = Pass::kTypical;
      r.rule_id = f[2];
    } else {
      throw ParseError(name, line_no, "unknown pass " + f[1]);
    }
    stats.add(r);
  }
  return stats;
}

inline std::string format_op_stats(const OpStats& s) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  const auto tf = s.token_frequencies();
  const auto cf = s.char_frequencies();
  out << "token pass: " << s.token_draws() << " draws\n";
  for (std::size_t i = 0; i < kTokenOpCount; ++i)
    out << "  " << kTokenOpNames[i] << '\t' << s.token_ops[i].drawn << '\t' << tf[i]
        << "\tapplied " << s.token_ops[i].applied << '\n';
  out << "char pass: " << s.char_draws() << " draws\n";
  for (std::size_t i = 0; i < kCharOpCount; ++i)
    out << "  " << kCharOpNames[i] << '\t' << s.char_ops[i].drawn << '\t' << cf[i]
        << "\tapplied " << s.char_ops[i].applied << '\n';
  out << "typical errors: " << s.typical_firings() << " firings\n";
  const double total = static_cast<double>(s.typical_firings());
  for (const auto& [rule, n] : s.rule_firings)
    out << "  " << rule << '\t' << n << '\t' << (total > 0 ? n / total : 0.0) << '\n';
  return out.str();
}

}  // namespace czgec
