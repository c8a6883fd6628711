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

// Corpus readers and writers: plain-text sentence streams, the M2 gold
// annotation format, "noisy<TAB>clean" parallel files and domain manifests.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "czgec/error.hpp"
#include "czgec/unicode.hpp"

namespace czgec {

enum class Tokenization {
  kWhitespace,   ///< split on whitespace only (pre-tokenized input, M2 S-lines)
  kPunctuation,  ///< whitespace, then detach leading/trailing punctuation
};

struct Sentence {
  std::vector<std::string> tokens;
  std::string raw;

  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out.push_back(' ');
      out += tokens[i];
    }
    return out;
  }
  bool empty() const noexcept { return tokens.empty(); }
  std::size_t size() const noexcept { return tokens.size(); }

  friend bool operator==(const Sentence& a, const Sentence& b) { return a.tokens == b.tokens; }
};

namespace detail {

inline void split_whitespace(std::string_view text, std::vector<std::string>& out) {
  if (unicode::is_ascii(text)) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i) out.emplace_back(text.substr(i, j - i));
      i = j;
    }
    return;
  }
  std::u32string cur;
  for (char32_t c : unicode::to_u32(text)) {
    if (unicode::is_space(c)) {
      if (!cur.empty()) out.push_back(unicode::to_utf8(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(unicode::to_utf8(cur));
}

inline void detach_punctuation(const std::string& chunk, std::vector<std::string>& out) {
  // Fast path: neither end is punctuation, so the chunk is one token.
  {
    const auto* p = reinterpret_cast<const uint8_t*>(chunk.data());
    const auto n = static_cast<int32_t>(chunk.size());
    int32_t i = 0, j = n;
    UChar32 first, last;
    U8_NEXT(p, i, n, first);
    U8_PREV(p, 0, j, last);
    if (first >= 0 && last >= 0 && !unicode::is_punct(static_cast<char32_t>(first)) &&
        !unicode::is_punct(static_cast<char32_t>(last))) {
      out.push_back(chunk);
      return;
    }
  }
  const std::u32string w = unicode::to_u32(chunk);
  std::size_t b = 0, e = w.size();
  while (b < e && unicode::is_punct(w[b])) ++b;
  while (e > b && unicode::is_punct(w[e - 1])) --e;
  if (b == 0 && e == w.size()) {
    out.push_back(chunk);
    return;
  }
  for (std::size_t i = 0; i < b; ++i) out.push_back(unicode::to_utf8(w.substr(i, 1)));
  if (e > b) out.push_back(unicode::to_utf8(w.substr(b, e - b)));
  for (std::size_t i = std::max(b, e); i < w.size(); ++i)
    out.push_back(unicode::to_utf8(w.substr(i, 1)));
}

}  // namespace detail

/// Tokenizes NFC text. Re-tokenizing the space-joined result is the identity.
inline std::vector<std::string> tokenize(std::string_view text,
                                         Tokenization policy = Tokenization::kPunctuation) {
  std::vector<std::string> chunks;
  detail::split_whitespace(text, chunks);
  if (policy == Tokenization::kWhitespace) return chunks;
  std::vector<std::string> tokens;
  tokens.reserve(chunks.size() + 4);
  for (const auto& c : chunks) detail::detach_punctuation(c, tokens);
  return tokens;
}

/// Builds a sentence from one line of (valid UTF-8) text.
inline Sentence make_sentence(std::string_view line,
                              Tokenization policy = Tokenization::kPunctuation) {
  Sentence s;
  s.raw = std::string(line);
  s.tokens = tokenize(unicode::nfc(line), policy);
  return s;
}

inline Sentence from_tokens(std::vector<std::string> tokens) {
  Sentence s;
  s.tokens = std::move(tokens);
  s.raw = s.text();
  return s;
}

/// Streams a one-sentence-per-line UTF-8 file. Blank lines are not sentences
/// and are skipped; memory is bounded by the longest line.
class SentenceReader {
 public:
  explicit SentenceReader(std::filesystem::path path,
                          Tokenization policy = Tokenization::kPunctuation)
      : path_(std::move(path)), policy_(policy), in_(path_, std::ios::binary) {
    if (!in_) throw Error("cannot open " + path_.string());
  }

  std::optional<Sentence> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (auto bad = unicode::find_invalid_utf8(line))
        throw ParseError(path_.string(), line_,
                         "malformed UTF-8 at byte " + std::to_string(*bad));
      Sentence s = make_sentence(line, policy_);
      if (s.empty()) continue;
      return s;
    }
    if (in_.bad()) throw Error("read error on " + path_.string());
    return std::nullopt;
  }

  /// 1-based number of the last line consumed.
  std::size_t line_number() const noexcept { return line_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  Tokenization policy_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

inline SentenceReader read_sentences(const std::filesystem::path& path,
                                     Tokenization policy = Tokenization::kPunctuation) {
  return SentenceReader(path, policy);
}

// ---------------------------------------------------------------------------
// M2 format

/// One A-line. Spans index source tokens; start == end is an insertion.
/// Noop annotations conventionally carry the span (-1, -1).
struct GoldAnnotation {
  long span_start = 0;
  long span_end = 0;
  std::string replacement;
  std::string error_type;
  int annotator_id = 0;

  bool is_noop() const { return error_type == "noop"; }
  friend bool operator==(const GoldAnnotation&, const GoldAnnotation&) = default;
};

struct M2Block {
  Sentence source;
  std::vector<GoldAnnotation> annotations;

  /// Distinct annotator ids in ascending order.
  std::vector<int> annotators() const {
    std::set<int> ids;
    for (const auto& a : annotations) ids.insert(a.annotator_id);
    return {ids.begin(), ids.end()};
  }

  std::vector<GoldAnnotation> by_annotator(int id) const {
    std::vector<GoldAnnotation> out;
    for (const auto& a : annotations)
      if (a.annotator_id == id) out.push_back(a);
    return out;
  }

  friend bool operator==(const M2Block& a, const M2Block& b) {
    return a.source == b.source && a.annotations == b.annotations;
  }
};

inline constexpr std::string_view kM2Separator = "|||";
inline constexpr std::string_view kM2None = "-NONE-";

namespace detail {

inline std::vector<std::string_view> split_m2_fields(std::string_view s) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(kM2Separator, pos);
    if (next == std::string_view::npos) {
      fields.push_back(s.substr(pos));
      return fields;
    }
    fields.push_back(s.substr(pos, next - pos));
    pos = next + kM2Separator.size();
  }
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline GoldAnnotation parse_a_line(std::string_view body, std::size_t n_tokens,
                                   const std::string& name, std::size_t line_no) {
  const auto fields = split_m2_fields(body);
  if (fields.size() < 6)
    throw ParseError(name, line_no,
                     "A-line needs 6 '|||'-separated fields, found " +
                         std::to_string(fields.size()));
  GoldAnnotation a;
  const std::string_view span = fields[0];
  const auto space = span.find(' ');
  if (space == std::string_view::npos || !parse_int(span.substr(0, space), a.span_start) ||
      !parse_int(span.substr(space + 1), a.span_end))
    throw ParseError(name, line_no, "bad span '" + std::string(span) + "'");
  a.error_type = std::string(fields[1]);
  a.replacement = fields[2] == kM2None ? std::string() : std::string(fields[2]);
  if (!parse_int(fields.back(), a.annotator_id))
    throw ParseError(name, line_no, "bad annotator id '" + std::string(fields.back()) + "'");
  const bool noop_span = a.is_noop() && a.span_start == -1 && a.span_end == -1;
  if (!noop_span && (a.span_start < 0 || a.span_start > a.span_end ||
                     a.span_end > static_cast<long>(n_tokens)))
    throw ParseError(name, line_no,
                     "span " + std::to_string(a.span_start) + " " + std::to_string(a.span_end) +
                         " out of range for " + std::to_string(n_tokens) + " tokens");
  return a;
}

}  // namespace detail

/// Parses M2 text. S-line sources are whitespace-tokenized as given.
inline std::vector<M2Block> parse_m2(std::istream& in, const std::string& name = "<m2>") {
  std::vector<M2Block> blocks;
  bool open = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      open = false;
      continue;
    }
    if (!unicode::is_valid_utf8(line)) throw ParseError(name, line_no, "malformed UTF-8");
    if (line[0] == 'S' && (line.size() == 1 || line[1] == ' ')) {
      M2Block b;
      const std::string_view text = line.size() > 2 ? std::string_view(line).substr(2) : "";
      b.source.raw = std::string(text);
      b.source.tokens = tokenize(unicode::nfc(text), Tokenization::kWhitespace);
      blocks.push_back(std::move(b));
      open = true;
    } else if (line[0] == 'A' && line.size() > 1 && line[1] == ' ') {
      if (!open) throw ParseError(name, line_no, "A-line without a preceding S-line");
      auto& b = blocks.back();
      b.annotations.push_back(detail::parse_a_line(std::string_view(line).substr(2),
                                                   b.source.size(), name, line_no));
    } else {
      throw ParseError(name, line_no, "expected an S-line, A-line or blank line");
    }
  }
  return blocks;
}

inline std::vector<M2Block> parse_m2(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_m2(in, path.string());
}

inline void write_m2_block(std::ostream& out, const M2Block& b) {
  out << 'S';
  for (const auto& t : b.source.tokens) out << ' ' << t;
  out << '\n';
  for (const auto& a : b.annotations) {
    const std::string_view repl = a.is_noop() && a.replacement.empty()
                                      ? kM2None
                                      : std::string_view(a.replacement);
    out << "A " << a.span_start << ' ' << a.span_end << kM2Separator << a.error_type
        << kM2Separator << repl << kM2Separator << "REQUIRED" << kM2Separator << kM2None
        << kM2Separator << a.annotator_id << '\n';
  }
  out << '\n';
}

inline void write_m2(std::span<const M2Block> blocks, std::ostream& out) {
  for (const auto& b : blocks) write_m2_block(out, b);
}

inline void write_m2(std::span<const M2Block> blocks, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_m2(blocks, out);
  out.flush();
  if (!out) throw Error("write error on " + path.string());
}

/// Applies non-noop edits of one annotator to the source tokens.
inline std::vector<std::string> apply_gold(const Sentence& source,
                                           std::span<const GoldAnnotation> edits) {
  std::vector<const GoldAnnotation*> sorted;
  for (const auto& e : edits)
    if (!e.is_noop() && e.span_start >= 0) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
    return a->span_start < b->span_start;
  });
  std::vector<std::string> out;
  long pos = 0;
  for (const auto* e : sorted) {
    if (e->span_start < pos) continue;  // overlapping edits: keep the first
    for (; pos < e->span_start; ++pos) out.push_back(source.tokens[pos]);
    detail::split_whitespace(e->replacement, out);
    pos = e->span_end;
  }
  for (; pos < static_cast<long>(source.size()); ++pos) out.push_back(source.tokens[pos]);
  return out;
}

// ---------------------------------------------------------------------------
// Parallel "noisy<TAB>clean" lines

inline bool has_line_control(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

inline void write_pair(std::ostream& out, std::string_view noisy, std::string_view clean) {
  if (has_line_control(noisy) || has_line_control(clean))
    throw Error("tab or newline inside parallel text");
  out << noisy << '\t' << clean << '\n';
}

struct TextPair {
  std::string source;
  std::string target;
};

/// Splits a "source<TAB>target" line; a line without a tab pairs with itself.
inline TextPair split_pair(std::string_view line) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) return {std::string(line), std::string(line)};
  if (line.find('\t', tab + 1) != std::string_view::npos)
    throw Error("more than one tab in parallel line");
  return {std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))};
}

// ---------------------------------------------------------------------------
// Domain manifests

struct DomainCorpus {
  std::string domain_id;
  std::filesystem::path path;
  std::size_t size = 0;
};

inline bool is_m2_path(const std::filesystem::path& p) { return p.extension() == ".m2"; }

/// Sentences in a corpus file: S-lines for .m2, non-blank lines otherwise.
inline std::size_t count_sentences(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const bool m2 = is_m2_path(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (m2) {
      n += !line.empty() && line[0] == 'S' && (line.size() == 1 || line[1] == ' ');
    } else {
      n += line.find_first_not_of(" \t\r") != std::string::npos;
    }
  }
  return n;
}

/// Reads "domain_id<TAB>path" lines. Relative paths resolve against the
/// manifest's directory; '#' starts a comment line. Empty corpora are kept
/// and reported through `warnings`.
inline std::vector<DomainCorpus> load_domain_manifest(const std::filesystem::path& path,
                                                      std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest " + path.string());
  std::vector<DomainCorpus> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw ParseError(path.string(), line_no, "expected domain_id<TAB>path");
    DomainCorpus d;
    d.domain_id = line.substr(0, tab);
    d.path = line.substr(tab + 1);
    if (d.path.is_relative()) d.path = path.parent_path() / d.path;
    if (!seen.insert(d.domain_id).second)
      throw ParseError(path.string(), line_no, "duplicate domain id '" + d.domain_id + "'");
    if (!std::filesystem::exists(d.path))
      throw ParseError(path.string(), line_no, "missing corpus file " + d.path.string());
    d.size = count_sentences(d.path);
    if (d.size == 0 && warnings)
      warnings->push_back("domain '" + d.domain_id + "' has an empty corpus");
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace czgec
