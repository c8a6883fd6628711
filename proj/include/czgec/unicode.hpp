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

// Thin UTF-8 helpers over ICU. Everything in the toolkit works on UTF-8
// std::string at rest and on char32_t code points when editing characters.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <unicode/bytestream.h>
#include <unicode/normalizer2.h>
#include <unicode/stringpiece.h>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "czgec/error.hpp"

namespace czgec::unicode {

/// Returns the byte offset of the first ill-formed sequence, or nullopt.
inline std::optional<std::size_t> find_invalid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    if (p[i] < 0x80) {
      ++i;
      continue;
    }
    const int32_t at = i;
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) return static_cast<std::size_t>(at);
  }
  return std::nullopt;
}

inline bool is_valid_utf8(std::string_view s) { return !find_invalid_utf8(s); }

inline bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

inline void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

/// Decodes UTF-8; throws Error on ill-formed input.
inline std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) throw Error("ill-formed UTF-8 sequence");
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

inline std::string to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

inline std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) n += (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  return n;
}

/// NFC-normalizes valid UTF-8. ASCII input is returned as is.
inline std::string nfc(std::string_view s) {
  if (is_ascii(s)) return std::string(s);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  const icu::StringPiece piece(s.data(), static_cast<int32_t>(s.size()));
  if (norm->isNormalizedUTF8(piece, status) && U_SUCCESS(status)) return std::string(s);
  status = U_ZERO_ERROR;
  std::string out;
  icu::StringByteSink<std::string> sink(&out, static_cast<int32_t>(s.size()));
  norm->normalizeUTF8(0, piece, sink, nullptr, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return out;
}

inline bool is_nfc(std::string_view s) {
  if (is_ascii(s)) return true;
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  const bool ok = norm->isNormalizedUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())), status);
  return U_SUCCESS(status) && ok;
}

inline bool is_punct(char32_t c) { return u_ispunct(static_cast<UChar32>(c)) != 0; }
inline bool is_alpha(char32_t c) { return u_isalpha(static_cast<UChar32>(c)) != 0; }
inline bool is_upper(char32_t c) { return u_isupper(static_cast<UChar32>(c)) != 0; }
inline bool is_lower(char32_t c) { return u_islower(static_cast<UChar32>(c)) != 0; }
inline bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }

inline char32_t to_lower(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
}

inline char32_t to_upper(char32_t c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') ? c - 32 : c;
  return static_cast<char32_t>(u_toupper(static_cast<UChar32>(c)));
}

inline std::u32string lower(std::u32string s) {
  for (auto& c : s) c = to_lower(c);
  return s;
}

inline std::string lower(std::string_view s) {
  if (is_ascii(s)) {
    std::string out(s);
    for (auto& c : out)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    return out;
  }
  return to_utf8(lower(to_u32(s)));
}

/// True when `pred` holds for every code point of `s` (`all`) or for some code
/// point (`!all`). Decodes in place; ill-formed input throws like to_u32.
template <class Pred>
inline bool scan_code_points(std::string_view s, Pred pred, bool all) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) throw Error("ill-formed UTF-8 sequence");
    if (pred(static_cast<char32_t>(c)) != all) return !all;
  }
  return all;
}

/// True when every code point is punctuation (and the token is non-empty).
inline bool is_all_punct(std::string_view s) {
  return !s.empty() && scan_code_points(s, is_punct, true);
}

inline bool has_alpha(std::string_view s) { return scan_code_points(s, is_alpha, false); }

enum class Casing { kLower, kCapitalized, kUpper, kOther };

/// Classifies the casing pattern of the cased letters in a word.
inline Casing casing_of(std::u32string_view w) {
  bool any_upper = false, any_lower = false, first_upper = false, seen_letter = false;
  bool rest_lower = true;
  for (char32_t c : w) {
    const bool up = is_upper(c), lo = is_lower(c);
    if (!up && !lo) continue;
    if (!seen_letter) {
      first_upper = up;
    } else if (up) {
      rest_lower = false;
    }
    seen_letter = true;
    any_upper |= up;
    any_lower |= lo;
  }
  if (!any_upper) return Casing::kLower;
  if (!any_lower) {
    // A single capital letter ("A") reads as capitalized, not shouting.
    std::size_t cased = 0;
    for (char32_t c : w) cased += is_upper(c);
    return cased > 1 ? Casing::kUpper : Casing::kCapitalized;
  }
  if (first_upper && rest_lower) return Casing::kCapitalized;
  return Casing::kOther;
}

/// Re-applies a casing pattern to a lowercase word. kOther leaves it as is.
inline std::u32string apply_casing(std::u32string w, Casing casing) {
  switch (casing) {
    case Casing::kLower:
    case Casing::kOther:
      break;
    case Casing::kUpper:
      for (auto& c : w) c = to_upper(c);
      break;
    case Casing::kCapitalized:
      for (auto& c : w) {
        if (is_alpha(c)) {
          c = to_upper(c);
          break;
        }
      }
      break;
  }
  return w;
}

inline std::string apply_casing(std::string_view w, Casing casing) {
  return to_utf8(apply_casing(to_u32(w), casing));
}

}  // namespace czgec::unicode
