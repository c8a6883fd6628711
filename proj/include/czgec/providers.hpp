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

// Substitution candidate sources for the token noising pass: a dictionary
// provider (edit-distance neighbours, Aspell-like), a morphological lexicon
// (other inflections of the same lemma, MorphoDiTa-like), and the Czech
// diacritics variant table used by the character pass.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "czgec/error.hpp"
#include "czgec/unicode.hpp"

namespace czgec {

/// Optimal-string-alignment (restricted Damerau-Levenshtein) distance.
/// Returns `limit + 1` as soon as the distance provably exceeds `limit`.
inline int osa_distance(std::u32string_view a, std::u32string_view b, int limit = 1 << 20) {
  const int n = static_cast<int>(a.size()), m = static_cast<int>(b.size());
  if (std::abs(n - m) > limit) return limit + 1;
  // Only cells with |i - j| <= limit can stay within the limit, so each row
  // fills a band around the diagonal. One cell past each band edge is set to
  // `big` so the next rows never read stale values. Three rolling rows
  // (i-2, i-1, i) share one reused buffer.
  const int big = limit + 1;
  thread_local std::vector<int> rows;
  const std::size_t need = 3 * static_cast<std::size_t>(m + 2);
  if (rows.size() < need) rows.resize(need);
  int* prev2 = rows.data();
  int* prev = prev2 + (m + 2);
  int* cur = prev + (m + 2);
  for (int j = 0; j <= std::min(m, limit); ++j) prev[j] = j;
  if (limit < m) prev[limit + 1] = big;
  for (int i = 1; i <= n; ++i) {
    const int lo = std::max(1, i - limit), hi = std::min(m, i + limit);
    cur[lo - 1] = lo == 1 ? i : big;
    int row_min = cur[lo - 1];
    for (int j = lo; j <= hi; ++j) {
      const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
      int v = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        v = std::min(v, prev2[j - 2] + 1);
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    if (hi < m) cur[hi + 1] = big;
    if (row_min > limit) return big;
    int* t = prev2;
    prev2 = prev;
    prev = cur;
    cur = t;
  }
  return std::min(prev[m], big);
}

namespace detail {

inline constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);
/// Low bits of a deletion hash that carry the number of deleted characters.
inline constexpr uint64_t kDeletionMask = 3;

/// FNV-1a over the code points of `s`, leaving out positions `skip1` and `skip2`.
inline uint64_t hash_u32(std::u32string_view s, std::size_t skip1 = kNoSkip,
                         std::size_t skip2 = kNoSkip) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == skip1 || i == skip2) continue;
    h ^= static_cast<uint64_t>(s[i]);
    h *= 0x100000001B3ULL;
  }
  return h ^ (h >> 29);
}

/// Hashes of every string reachable from `w` by deleting at most `k` (0 to 2)
/// code points, sorted and de-duplicated.
inline void deletion_hashes(std::u32string_view w, int k, std::vector<uint64_t>& out) {
  if (k > 2) throw Error("deletion neighborhoods are limited to distance 2");
  const std::size_t start = out.size();
  const std::size_t n = w.size();
  auto tagged = [](uint64_t h, uint64_t deleted) { return (h & ~kDeletionMask) | deleted; };
  out.push_back(tagged(hash_u32(w), 0));
  for (std::size_t i = 0; k >= 1 && i < n; ++i) {
    // Deleting any member of a run of equal characters gives the same string.
    if (i > 0 && w[i] == w[i - 1]) continue;
    out.push_back(tagged(hash_u32(w, i), 1));
    for (std::size_t j = i + 1; k >= 2 && j < n; ++j) {
      if (j > i + 1 && w[j] == w[j - 1]) continue;
      out.push_back(tagged(hash_u32(w, i, j), 2));
    }
  }
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(start), out.end());
  out.erase(std::unique(out.begin() + static_cast<std::ptrdiff_t>(start), out.end()), out.end());
}

}  // namespace detail

struct Suggestion {
  std::string form;
  int distance = 0;
  double frequency = 0.0;
};

/// Word list with optional frequencies, indexed for edit-distance lookup.
/// Forms are NFC and stored case-folded; membership is case-insensitive.
class Lexicon {
 public:
  static constexpr int kIndexDistance = 2;

  Lexicon() = default;

  explicit Lexicon(std::vector<std::pair<std::string, double>> words) {
    std::unordered_map<std::string, std::size_t> at;
    for (auto& [w, f] : words) {
      if (w.empty()) continue;
      std::string folded = unicode::lower(unicode::nfc(w));
      auto [it, inserted] = at.emplace(folded, forms_.size());
      if (inserted) {
        forms_.push_back(std::move(folded));
        freq_.push_back(f);
      } else {
        freq_[it->second] = std::max(freq_[it->second], f);
      }
    }
    build_index();
  }

  /// Reads "form[<TAB>frequency]" lines. Missing frequency counts as 1.
  static Lexicon load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open lexicon " + path.string());
    std::vector<std::pair<std::string, double>> words;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (!unicode::is_valid_utf8(line)) throw ParseError(path.string(), line_no, "malformed UTF-8");
      const auto tab = line.find('\t');
      double f = 1.0;
      if (tab != std::string::npos) {
        try {
          f = std::stod(line.substr(tab + 1));
        } catch (const std::exception&) {
          throw ParseError(path.string(), line_no, "bad frequency");
        }
        if (f < 0) throw ParseError(path.string(), line_no, "negative frequency");
        line.resize(tab);
      }
      words.emplace_back(std::move(line), f);
    }
    Lexicon lex(std::move(words));
    if (lex.empty()) throw Error("lexicon " + path.string() + " has no entries");
    return lex;
  }

  bool empty() const noexcept { return forms_.empty(); }
  std::size_t size() const noexcept { return forms_.size(); }
  const std::string& form(std::size_t i) const { return forms_[i]; }
  double frequency(std::size_t i) const { return freq_[i]; }
  std::span<const double> frequencies() const noexcept { return freq_; }

  bool contains(std::string_view word) const {
    const std::string folded = unicode::lower(word);
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), folded,
                               [&](uint32_t id, const std::string& w) { return forms_[id] < w; });
    return it != sorted_.end() && forms_[*it] == folded;
  }

  /// Forms within OSA distance `max_distance` (at most kIndexDistance) of the
  /// case-folded word, excluding the word itself, ranked by distance, then
  /// frequency (descending), then folded form; at most `limit` are returned.
  /// Candidates carry the query's casing.
  std::vector<Suggestion> suggest(std::string_view word, int max_distance = 2,
                                  std::size_t limit = SIZE_MAX) const {
    if (max_distance > kIndexDistance)
      throw Error("suggestion distance above the index bound of " +
                  std::to_string(kIndexDistance));
    if (index_.empty()) return {};
    const std::u32string original = unicode::to_u32(word);
    const std::u32string query = unicode::lower(original);
    thread_local std::vector<uint64_t> hashes;
    hashes.clear();
    detail::deletion_hashes(query, max_distance, hashes);
    // Probes are independent; touching every directory slot, then every
    // bucket, before scanning lets the cache misses overlap.
    for (uint64_t h : hashes) __builtin_prefetch(&buckets_[h >> (64 - kBucketBits)]);
    for (uint64_t h : hashes) __builtin_prefetch(&index_[buckets_[h >> (64 - kBucketBits)]]);

    struct Ranked {
      int distance;
      double frequency;
      uint32_t id;
    };
    std::vector<Ranked> ranked;
    // Forms within distance `d` share a deletion variant reached by at most
    // `d` deletions on each side.
    auto collect = [&](int d) {
      thread_local std::vector<uint32_t> ids;
      ids.clear();
      for (uint64_t h : hashes) {
        if (static_cast<int>(h & detail::kDeletionMask) > d) continue;
        const uint64_t tag = h >> kTagShift;
        const std::size_t b = static_cast<std::size_t>(h >> (64 - kBucketBits));
        for (std::size_t e = buckets_[b]; e < buckets_[b + 1]; ++e)
          if ((index_[e] >> kTagShift) == tag &&
              static_cast<int>((index_[e] >> kIdBits) & detail::kDeletionMask) <= d)
            ids.push_back(static_cast<uint32_t>(index_[e] & kIdMask));
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      ranked.clear();
      for (uint32_t id : ids) {
        const std::u32string_view cand = folded(id);
        if (cand == query) continue;
        const int dist = osa_distance(query, cand, d);
        if (dist <= d) ranked.push_back({dist, freq_[id], id});
      }
    };
    // Ranking is by distance first, so `limit` forms at distance 1 settle the
    // answer without the much larger distance-2 neighborhood.
    const bool staged = max_distance > 1 && limit != SIZE_MAX;
    if (staged) collect(1);
    if (!staged || ranked.size() < limit) collect(max_distance);
    auto before = [&](const Ranked& a, const Ranked& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      if (a.frequency != b.frequency) return a.frequency > b.frequency;
      return forms_[a.id] < forms_[b.id];
    };
    const std::size_t keep = std::min(limit, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                      ranked.end(), before);
    std::vector<Suggestion> out;
    out.reserve(keep);
    const auto casing = unicode::casing_of(original);
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& r = ranked[i];
      out.push_back({casing == unicode::Casing::kLower || casing == unicode::Casing::kOther
                         ? forms_[r.id]
                         : unicode::to_utf8(unicode::apply_casing(std::u32string(folded(r.id)), casing)),
                     r.distance, r.frequency});
    }
    return out;
  }

 private:
  // Index entries pack (hash >> kTagShift), the deletion count of the
  // variant and a kIdBits-wide form id. A directory over the top kBucketBits
  // of the hash narrows each lookup to a handful of entries. Truncated-hash
  // collisions only add candidates, which the distance check rejects.
  static constexpr int kIdBits = 24;
  static constexpr int kTagShift = kIdBits + 2;
  static constexpr uint64_t kIdMask = (uint64_t{1} << kIdBits) - 1;
  static constexpr int kBucketBits = 20;

  void build_index() {
    if (forms_.size() > kIdMask) throw Error("lexicon too large for the suggestion index");
    folded_offsets_.reserve(forms_.size() + 1);
    folded_offsets_.push_back(0);
    std::vector<uint64_t> hashes;
    for (uint32_t id = 0; id < forms_.size(); ++id) {
      folded_chars_ += unicode::to_u32(forms_[id]);
      folded_offsets_.push_back(static_cast<uint32_t>(folded_chars_.size()));
      hashes.clear();
      detail::deletion_hashes(folded(id), kIndexDistance, hashes);
      for (uint64_t h : hashes)
        index_.push_back(((h >> kTagShift) << kTagShift) |
                         ((h & detail::kDeletionMask) << kIdBits) | id);
    }
    std::sort(index_.begin(), index_.end());
    buckets_.assign((std::size_t{1} << kBucketBits) + 1, 0);
    for (uint64_t key : index_) ++buckets_[(key >> (64 - kBucketBits)) + 1];
    for (std::size_t b = 1; b < buckets_.size(); ++b) buckets_[b] += buckets_[b - 1];
    sorted_.resize(forms_.size());
    for (uint32_t i = 0; i < sorted_.size(); ++i) sorted_[i] = i;
    std::sort(sorted_.begin(), sorted_.end(),
              [&](uint32_t a, uint32_t b) { return forms_[a] < forms_[b]; });
  }

  std::vector<std::string> forms_;
  std::u32string_view folded(uint32_t id) const {
    return std::u32string_view(folded_chars_)
        .substr(folded_offsets_[id], folded_offsets_[id + 1] - folded_offsets_[id]);
  }

  // Decoded forms, concatenated; form i spans [offsets[i], offsets[i + 1]).
  std::u32string folded_chars_;
  std::vector<uint32_t> folded_offsets_;
  std::vector<double> freq_;
  std::vector<uint64_t> index_;
  std::vector<uint32_t> buckets_;
  std::vector<uint32_t> sorted_;
};

inline std::vector<Suggestion> dict_suggest(std::string_view word, const Lexicon& lexicon,
                                            int max_distance = 2, std::size_t limit = SIZE_MAX) {
  return lexicon.suggest(word, max_distance, limit);
}

/// Form/lemma relation of a morphological dictionary. Forms and lemmas are
/// stored case-folded.
class MorphLexicon {
 public:
  MorphLexicon() = default;

  explicit MorphLexicon(std::span<const std::pair<std::string, std::string>> form_lemma) {
    std::unordered_map<std::string, uint32_t> lemma_ids;
    for (const auto& [f, l] : form_lemma) {
      if (f.empty() || l.empty()) continue;
      const std::string form = unicode::lower(unicode::nfc(f));
      const std::string lemma = unicode::lower(unicode::nfc(l));
      auto [lit, new_lemma] = lemma_ids.emplace(lemma, static_cast<uint32_t>(lemmas_.size()));
      if (new_lemma) {
        lemmas_.push_back(lemma);
        paradigms_.emplace_back();
      }
      auto& lemmas_of_form = form_lemmas_[form];
      if (std::find(lemmas_of_form.begin(), lemmas_of_form.end(), lit->second) ==
          lemmas_of_form.end()) {
        lemmas_of_form.push_back(lit->second);
        paradigms_[lit->second].push_back(form);
      }
    }
    for (auto& p : paradigms_) std::sort(p.begin(), p.end());
  }

  /// Reads "form<TAB>lemma[<TAB>...]" lines; extra columns (tags) are ignored.
  static MorphLexicon load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open morphological lexicon " + path.string());
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (!unicode::is_valid_utf8(line)) throw ParseError(path.string(), line_no, "malformed UTF-8");
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError(path.string(), line_no, "expected form<TAB>lemma");
      const auto tab2 = line.find('\t', tab + 1);
      pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1, tab2 == std::string::npos
                                                                      ? std::string::npos
                                                                      : tab2 - tab - 1));
    }
    MorphLexicon lex(pairs);
    if (lex.empty()) throw Error("morphological lexicon " + path.string() + " has no entries");
    return lex;
  }

  bool empty() const noexcept { return form_lemmas_.empty(); }
  std::size_t form_count() const noexcept { return form_lemmas_.size(); }
  std::size_t lemma_count() const noexcept { return lemmas_.size(); }

  std::vector<std::string> lemmas(std::string_view word) const {
    std::vector<std::string> out;
    auto it = form_lemmas_.find(unicode::lower(word));
    if (it == form_lemmas_.end()) return out;
    for (uint32_t id : it->second) out.push_back(lemmas_[id]);
    return out;
  }

  /// All forms of all lemmas of `word` except the word itself, in the
  /// word's casing, sorted.
  std::vector<std::string> forms(std::string_view word) const {
    std::vector<std::string> out;
    const std::string folded = unicode::lower(word);
    auto it = form_lemmas_.find(folded);
    if (it == form_lemmas_.end()) return out;
    const auto casing = unicode::casing_of(unicode::to_u32(word));
    for (uint32_t id : it->second)
      for (const auto& f : paradigms_[id])
        if (f != folded) out.push_back(unicode::apply_casing(f, casing));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::vector<std::string> lemmas_;
  std::vector<std::vector<std::string>> paradigms_;
  std::unordered_map<std::string, std::vector<uint32_t>> form_lemmas_;
};

inline std::vector<std::string> morph_forms(std::string_view word, const MorphLexicon& lex) {
  return lex.forms(word);
}

/// Equivalence classes of characters differing only in diacritics. The first
/// character of each class is its undiacritized base.
class DiacriticsTable {
 public:
  explicit DiacriticsTable(std::vector<std::u32string> classes) : classes_(std::move(classes)) {
    for (uint32_t i = 0; i < classes_.size(); ++i) {
      for (char32_t c : classes_[i]) {
        if (!class_of_.emplace(c, i).second)
          throw Error("diacritics table: character in two classes");
      }
    }
  }

  static const DiacriticsTable& czech() {
    static const DiacriticsTable table({
        U"aá", U"cč", U"dď", U"eéě", U"ií", U"nň", U"oó", U"rř", U"sš", U"tť", U"uúů", U"yý",
        U"zž", U"AÁ", U"CČ", U"DĎ", U"EÉĚ", U"IÍ", U"NŇ", U"OÓ", U"RŘ", U"SŠ", U"TŤ", U"UÚŮ",
        U"YÝ", U"ZŽ",
    });
    return table;
  }

  bool has_variants(char32_t c) const { return class_of_.contains(c); }

  /// Variants of `c` other than `c`; empty when it has none.
  std::u32string variants(char32_t c) const {
    auto it = class_of_.find(c);
    if (it == class_of_.end()) return {};
    std::u32string out;
    for (char32_t v : classes_[it->second])
      if (v != c) out.push_back(v);
    return out;
  }

  char32_t fold(char32_t c) const {
    auto it = class_of_.find(c);
    return it == class_of_.end() ? c : classes_[it->second].front();
  }

  std::u32string fold(std::u32string s) const {
    for (auto& c : s) c = fold(c);
    return s;
  }

  std::string fold(std::string_view s) const { return unicode::to_utf8(fold(unicode::to_u32(s))); }

  std::span<const std::u32string> classes() const noexcept { return classes_; }

 private:
  std::vector<std::u32string> classes_;
  std::unordered_map<char32_t, uint32_t> class_of_;
};

inline std::u32string diacritics_variants(char32_t c,
                                          const DiacriticsTable& table = DiacriticsTable::czech()) {
  return table.variants(c);
}

}  // namespace czgec
