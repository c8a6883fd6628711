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

// Shared fixtures for the test suites: scratch directories and synthetic
// Czech-looking lexicons and corpora.

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "czgec/czgec.hpp"

namespace czgec::testing {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("czgec_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Distinct pseudo-Czech words built from syllables; deterministic in seed.
inline std::vector<std::string> synthetic_words(std::size_t n, uint64_t seed = 7) {
  static const char* onsets[] = {"", "b", "č", "d", "h", "ch", "j", "k", "l", "m", "n", "p",
                                 "r", "ř", "s", "š", "t", "v", "z", "ž", "st", "pr", "kr", "zn"};
  static const char* nuclei[] = {"a", "á", "e", "é", "ě", "i", "í", "o", "u", "ů", "y", "ý"};
  static const char* codas[] = {"", "", "", "n", "k", "l", "s", "t", "m", "ch"};
  std::mt19937_64 gen(seed);
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    const int syllables = 1 + static_cast<int>(gen() % 3);
    std::string w;
    for (int s = 0; s < syllables; ++s) {
      w += onsets[gen() % std::size(onsets)];
      w += nuclei[gen() % std::size(nuclei)];
      w += codas[gen() % std::size(codas)];
    }
    if (seen.insert(w).second) out.push_back(w);
  }
  return out;
}

/// word<TAB>frequency lines with a Zipf-like frequency profile.
inline std::string lexicon_text(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i)
    out += words[i] + "\t" + std::to_string(1000000 / (i + 1) + 1) + "\n";
  return out;
}

/// form<TAB>lemma lines: every word is a stem with six case endings.
inline std::string morph_text(const std::vector<std::string>& stems) {
  static const char* endings[] = {"a", "y", "u", "ou", "ě", "o"};
  std::string out;
  for (const auto& s : stems)
    for (const char* e : endings) out += s + e + "\t" + s + "a\n";
  return out;
}

/// Space-tokenized sentences drawn from `words` (with some punctuation),
/// `avg_len` tokens on average.
inline std::vector<std::string> synthetic_sentences(const std::vector<std::string>& words,
                                                    std::size_t count, std::size_t avg_len,
                                                    uint64_t seed = 11) {
  std::mt19937_64 gen(seed);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t len = avg_len / 2 + gen() % (avg_len + 1);
    std::string s;
    for (std::size_t t = 0; t < len; ++t) {
      std::string w = words[gen() % std::min<std::size_t>(words.size(), 5000)];
      if (t == 0) w = unicode::apply_casing(w, unicode::Casing::kCapitalized);
      if (t) s += ' ';
      s += w;
      if (t + 1 < len && gen() % 8 == 0) s += " ,";
    }
    s += " .";
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace czgec::testing
