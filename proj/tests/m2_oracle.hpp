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

// Exhaustive reference for edit extraction on short sentences: enumerate
// every minimum-cost token alignment, every grouping of its operations into
// edits, and pick the grouping with the most gold matches (then fewest edits).

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "czgec/m2_scorer.hpp"

namespace czgec::testing {

using Tokens = std::vector<std::string>;

enum class Step { kMatch, kSub, kIns, kDel };

inline int min_cost(const Tokens& a, const Tokens& b, std::size_t i, std::size_t j,
                    std::vector<std::vector<int>>& memo) {
  if (memo[i][j] >= 0) return memo[i][j];
  int best;
  if (i == a.size()) {
    best = static_cast<int>(b.size() - j);
  } else if (j == b.size()) {
    best = static_cast<int>(a.size() - i);
  } else {
    best = std::min(min_cost(a, b, i + 1, j, memo), min_cost(a, b, i, j + 1, memo)) + 1;
    best = std::min(best, min_cost(a, b, i + 1, j + 1, memo) + (a[i] == b[j] ? 0 : 1));
  }
  return memo[i][j] = best;
}

/// All step sequences of minimum total cost (a match costs 0 and is only
/// taken on equal tokens; substituting equal tokens is not a separate path).
inline std::vector<std::vector<Step>> optimal_alignments(const Tokens& a, const Tokens& b) {
  std::vector<std::vector<int>> memo(a.size() + 1, std::vector<int>(b.size() + 1, -1));
  std::vector<std::vector<Step>> out;
  std::vector<Step> path;
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    if (i == a.size() && j == b.size()) {
      out.push_back(path);
      return;
    }
    const int here = min_cost(a, b, i, j, memo);
    if (i < a.size() && j < b.size()) {
      const bool eq = a[i] == b[j];
      if (min_cost(a, b, i + 1, j + 1, memo) + (eq ? 0 : 1) == here) {
        path.push_back(eq ? Step::kMatch : Step::kSub);
        self(self, i + 1, j + 1);
        path.pop_back();
      }
    }
    if (i < a.size() && min_cost(a, b, i + 1, j, memo) + 1 == here) {
      path.push_back(Step::kDel);
      self(self, i + 1, j);
      path.pop_back();
    }
    if (j < b.size() && min_cost(a, b, i, j + 1, memo) + 1 == here) {
      path.push_back(Step::kIns);
      self(self, i, j + 1);
      path.pop_back();
    }
  };
  rec(rec, 0, 0);
  return out;
}

/// Every way to cut an alignment into edits: runs that start and end with a
/// non-match step and hold at most `k` matches. Matches outside edits are
/// unchanged tokens.
inline std::set<std::vector<EditSpan>> decompositions(const Tokens& a, const Tokens& b, int k) {
  std::set<std::vector<EditSpan>> out;
  for (const auto& steps : optimal_alignments(a, b)) {
    // Source/hypothesis positions before each step.
    std::vector<std::size_t> si(steps.size() + 1), hj(steps.size() + 1);
    for (std::size_t s = 0; s < steps.size(); ++s) {
      si[s + 1] = si[s] + (steps[s] != Step::kIns);
      hj[s + 1] = hj[s] + (steps[s] != Step::kDel);
    }
    std::vector<EditSpan> current;
    auto rec = [&](auto&& self, std::size_t s) -> void {
      if (s == steps.size()) {
        out.insert(current);
        return;
      }
      if (steps[s] == Step::kMatch) {
        self(self, s + 1);
        return;
      }
      int matches = 0;
      for (std::size_t e = s; e < steps.size(); ++e) {
        if (steps[e] == Step::kMatch) {
          if (++matches > k) break;
          continue;
        }
        EditSpan edit{si[s], si[e + 1], {}};
        for (std::size_t j = hj[s]; j < hj[e + 1]; ++j)
          edit.replacement += (j > hj[s] ? " " : "") + b[j];
        current.push_back(edit);
        self(self, e + 1);
        current.pop_back();
      }
    };
    rec(rec, 0);
  }
  return out;
}

struct OracleResult {
  std::size_t tp = 0;
  std::size_t edits = 0;
};

inline OracleResult oracle_best(const std::set<std::vector<EditSpan>>& decomps,
                                const std::vector<EditSpan>& gold) {
  const std::set<EditSpan> g(gold.begin(), gold.end());
  OracleResult best{0, SIZE_MAX};
  bool first = true;
  for (const auto& d : decomps) {
    std::set<EditSpan> hit;
    for (const auto& e : d)
      if (g.contains(e)) hit.insert(e);
    const OracleResult r{hit.size(), d.size()};
    if (first || r.tp > best.tp || (r.tp == best.tp && r.edits < best.edits)) best = r;
    first = false;
  }
  return best;
}

}  // namespace czgec::testing
