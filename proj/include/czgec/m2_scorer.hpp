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

// M2-style edit scoring.
//
// align() builds a lattice of every way to decompose the token-level
// Levenshtein alignment of source and hypothesis into edits. Edges are
// either single matched tokens (noops) or candidate edits: stretches of the
// optimal alignment that start and end with a changed token and contain at
// most `max_unchanged_words` matched tokens in between. best_edit_selection()
// picks the source-to-hypothesis path with the most edits equal to gold
// edits, preferring fewer edits on ties.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "czgec/corpus_io.hpp"
#include "czgec/error.hpp"
#include "czgec/unicode.hpp"

namespace czgec {

struct EditSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string replacement;

  friend bool operator==(const EditSpan&, const EditSpan&) = default;
  friend auto operator<=>(const EditSpan&, const EditSpan&) = default;
};

inline std::string normalize_spaces(std::string_view s) {
  std::vector<std::string> parts;
  detail::split_whitespace(s, parts);
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

/// Rebuilds the hypothesis from the source and a set of non-overlapping edits.
inline std::vector<std::string> apply_edits(std::span<const std::string> source,
                                            std::vector<EditSpan> edits) {
  std::stable_sort(edits.begin(), edits.end(),
                   [](const EditSpan& a, const EditSpan& b) { return a.start < b.start; });
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (const auto& e : edits) {
    if (e.start < pos || e.end > source.size()) throw Error("overlapping or out-of-range edit");
    for (; pos < e.start; ++pos) out.push_back(source[pos]);
    detail::split_whitespace(e.replacement, out);
    pos = e.end;
  }
  for (; pos < source.size(); ++pos) out.push_back(source[pos]);
  return out;
}

struct LatticeEdge {
  uint32_t from = 0;
  uint32_t to = 0;
  bool noop = false;
  EditSpan edit;  ///< meaningful when !noop
};

struct EditLattice {
  std::size_t source_len = 0;
  std::size_t hypothesis_len = 0;
  std::size_t distance = 0;  ///< Levenshtein distance of the two token lists
  /// (source position, hypothesis position) of each vertex, topologically
  /// ordered. Vertex 0 is (0, 0); the last vertex is (source_len, hypothesis_len).
  std::vector<std::pair<std::size_t, std::size_t>> vertices;
  std::vector<LatticeEdge> edges;  ///< grouped by `from`, ascending
  std::vector<std::size_t> first_edge;  ///< CSR offsets into `edges`, size V+1

  uint32_t start() const { return 0; }
  uint32_t goal() const { return static_cast<uint32_t>(vertices.size() - 1); }

  std::span<const LatticeEdge> out_edges(uint32_t v) const {
    return std::span(edges).subspan(first_edge[v], first_edge[v + 1] - first_edge[v]);
  }

  std::vector<EditSpan> candidate_edits() const {
    std::vector<EditSpan> out;
    for (const auto& e : edges)
      if (!e.noop) out.push_back(e.edit);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

/// Builds the edit lattice. Costs: match 0; substitution, insertion and
/// deletion 1 each. Only steps on some minimum-cost alignment are used.
inline EditLattice align(std::span<const std::string> source,
                         std::span<const std::string> hypothesis,
                         int max_unchanged_words = 2) {
  const std::size_t n = source.size(), m = hypothesis.size();
  const std::size_t W = m + 1;
  auto at = [W](std::size_t i, std::size_t j) { return i * W + j; };
  constexpr uint32_t kInf = std::numeric_limits<uint32_t>::max() / 2;

  std::vector<uint32_t> fwd((n + 1) * W), bwd((n + 1) * W);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      uint32_t best = kInf;
      if (i > 0) best = std::min(best, fwd[at(i - 1, j)] + 1);
      if (j > 0) best = std::min(best, fwd[at(i, j - 1)] + 1);
      if (i > 0 && j > 0)
        best = std::min(best, fwd[at(i - 1, j - 1)] + (source[i - 1] == hypothesis[j - 1] ? 0u : 1u));
      fwd[at(i, j)] = best;
    }
  }
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n && j == m) continue;
      uint32_t best = kInf;
      if (i < n) best = std::min(best, bwd[at(i + 1, j)] + 1);
      if (j < m) best = std::min(best, bwd[at(i, j + 1)] + 1);
      if (i < n && j < m)
        best = std::min(best, bwd[at(i + 1, j + 1)] + (source[i] == hypothesis[j] ? 0u : 1u));
      bwd[at(i, j)] = best;
    }
  }
  const uint32_t total = fwd[at(n, m)];

  EditLattice lat;
  lat.source_len = n;
  lat.hypothesis_len = m;
  lat.distance = total;

  // Vertices on some optimal alignment, ordered by anti-diagonal.
  std::vector<int32_t> vid((n + 1) * W, -1);
  for (std::size_t d = 0; d <= n + m; ++d) {
    for (std::size_t i = (d > m ? d - m : 0); i <= std::min(d, n); ++i) {
      const std::size_t j = d - i;
      if (fwd[at(i, j)] + bwd[at(i, j)] == total) {
        vid[at(i, j)] = static_cast<int32_t>(lat.vertices.size());
        lat.vertices.emplace_back(i, j);
      }
    }
  }

  // Optimal single steps out of a vertex: (target, is_match).
  struct Step {
    uint32_t to;
    bool match;
  };
  auto steps = [&](std::size_t i, std::size_t j, std::vector<Step>& out) {
    out.clear();
    const uint32_t here = fwd[at(i, j)];
    auto consider = [&](std::size_t i2, std::size_t j2, uint32_t cost, bool match) {
      if (vid[at(i2, j2)] >= 0 && here + cost + bwd[at(i2, j2)] == total &&
          fwd[at(i2, j2)] == here + cost)
        out.push_back({static_cast<uint32_t>(vid[at(i2, j2)]), match});
    };
    if (i < n && j < m) {
      const bool eq = source[i] == hypothesis[j];
      consider(i + 1, j + 1, eq ? 0 : 1, eq);
    }
    if (i < n) consider(i + 1, j, 1, false);
    if (j < m) consider(i, j + 1, 1, false);
  };

  const std::size_t V = lat.vertices.size();
  const int K = std::max(0, max_unchanged_words);
  std::vector<std::vector<Step>> adj(V);
  for (uint32_t v = 0; v < V; ++v) steps(lat.vertices[v].first, lat.vertices[v].second, adj[v]);

  // State key: (vertex, matches so far, last step changed a token).
  std::vector<uint8_t> seen;
  std::vector<uint32_t> touched;
  std::vector<std::tuple<uint32_t, int, bool>> stack;
  std::vector<uint8_t> is_end(V, 0);
  std::vector<uint32_t> ends;
  lat.first_edge.assign(V + 1, 0);
  auto key = [K](uint32_t v, int k, bool last) {
    return (static_cast<std::size_t>(v) * (K + 1) + k) * 2 + (last ? 1 : 0);
  };
  seen.assign(V * (K + 1) * 2, 0);

  for (uint32_t u = 0; u < V; ++u) {
    lat.first_edge[u] = lat.edges.size();
    for (const Step& s : adj[u])
      if (s.match) lat.edges.push_back({u, s.to, true, {}});

    ends.clear();
    stack.clear();
    for (const Step& s : adj[u])
      if (!s.match) stack.emplace_back(s.to, 0, true);
    while (!stack.empty()) {
      auto [v, k, last] = stack.back();
      stack.pop_back();
      const std::size_t kk = key(v, k, last);
      if (seen[kk]) continue;
      seen[kk] = 1;
      touched.push_back(static_cast<uint32_t>(kk));
      if (last && !is_end[v]) {
        is_end[v] = 1;
        ends.push_back(v);
      }
      for (const Step& s : adj[v]) {
        if (s.match) {
          if (k + 1 <= K) stack.emplace_back(s.to, k + 1, false);
        } else {
          stack.emplace_back(s.to, k, true);
        }
      }
    }
    for (uint32_t kk : touched) seen[kk] = 0;
    touched.clear();

    std::sort(ends.begin(), ends.end());
    const auto [ui, uj] = lat.vertices[u];
    for (uint32_t v : ends) {
      is_end[v] = 0;
      const auto [vi, vj] = lat.vertices[v];
      EditSpan e{ui, vi, {}};
      for (std::size_t j = uj; j < vj; ++j) {
        if (j > uj) e.replacement.push_back(' ');
        e.replacement += hypothesis[j];
      }
      lat.edges.push_back({u, v, false, std::move(e)});
    }
  }
  lat.first_edge[V] = lat.edges.size();
  return lat;
}

struct EditCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  EditCounts& operator+=(const EditCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend EditCounts operator+(EditCounts a, const EditCounts& b) { return a += b; }
  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

inline double precision(const EditCounts& c) {
  return c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

inline double recall(const EditCounts& c) {
  return c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

inline double f_beta(const EditCounts& c, double beta = 0.5) {
  const double p = precision(c), r = recall(c), b2 = beta * beta;
  const double num = (1 + b2) * p * r;
  return num == 0 ? 0.0 : num / (b2 * p + r);
}

struct Selection {
  std::vector<EditSpan> edits;
  EditCounts counts;
};

/// Normalized, de-duplicated non-noop edits of one annotator.
inline std::vector<EditSpan> gold_edit_set(std::span<const GoldAnnotation> annotations,
                                           bool lowercase = false) {
  std::vector<EditSpan> out;
  for (const auto& a : annotations) {
    if (a.is_noop() || a.span_start < 0) continue;
    std::string r = normalize_spaces(a.replacement);
    if (lowercase) r = unicode::lower(r);
    out.push_back({static_cast<std::size_t>(a.span_start), static_cast<std::size_t>(a.span_end),
                   std::move(r)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Path through the lattice maximizing exact gold matches (same span and
/// replacement), then minimizing the number of edits. Each gold edit is
/// credited at most once, even when a path repeats an identical insertion.
inline Selection best_edit_selection(const EditLattice& lat, std::span<const EditSpan> gold) {
  std::map<EditSpan, int> gold_index;
  // Insertion gold edits get a bit within their source position.
  std::map<std::size_t, int> insertions_at;
  std::vector<int> bit_of(gold.size(), -1);
  for (std::size_t g = 0; g < gold.size(); ++g) {
    gold_index.emplace(gold[g], static_cast<int>(g));
    if (gold[g].start == gold[g].end) {
      const int b = insertions_at[gold[g].start]++;
      if (b >= 31) throw Error("too many gold insertions at one position");
      bit_of[g] = b;
    }
  }

  struct State {
    uint32_t mask;
    long tp;
    long edits;
    int64_t prev;  ///< index into `states`, -1 for the start
    int64_t edge;  ///< lattice edge taken into this state
  };
  std::vector<State> states;
  std::vector<std::vector<std::size_t>> at_vertex(lat.vertices.size());
  auto better = [](long tp, long ed, const State& s) {
    return tp > s.tp || (tp == s.tp && ed < s.edits);
  };
  auto relax = [&](uint32_t v, uint32_t mask, long tp, long ed, int64_t prev, int64_t edge) {
    for (std::size_t si : at_vertex[v]) {
      if (states[si].mask != mask) continue;
      if (better(tp, ed, states[si])) states[si] = {mask, tp, ed, prev, edge};
      return;
    }
    at_vertex[v].push_back(states.size());
    states.push_back({mask, tp, ed, prev, edge});
  };

  relax(lat.start(), 0, 0, 0, -1, -1);
  for (uint32_t v = 0; v < lat.vertices.size(); ++v) {
    const auto here = at_vertex[v];  // copy: relax() may append to other vertices only
    for (std::size_t si : here) {
      const State s = states[si];
      for (std::size_t ei = lat.first_edge[v]; ei < lat.first_edge[v + 1]; ++ei) {
        const auto& e = lat.edges[ei];
        if (e.noop) {
          relax(e.to, 0, s.tp, s.edits, static_cast<int64_t>(si), static_cast<int64_t>(ei));
          continue;
        }
        long gain = 0;
        uint32_t mask = 0;
        auto it = gold_index.find(e.edit);
        if (e.edit.start == e.edit.end) {
          mask = s.mask;
          if (it != gold_index.end()) {
            const uint32_t bit = 1u << bit_of[it->second];
            if (!(mask & bit)) {
              gain = 1;
              mask |= bit;
            }
          }
        } else {
          gain = it != gold_index.end() ? 1 : 0;
        }
        relax(e.to, mask, s.tp + gain, s.edits + 1, static_cast<int64_t>(si),
              static_cast<int64_t>(ei));
      }
    }
  }

  const auto& finals = at_vertex[lat.goal()];
  std::size_t best = finals.front();
  for (std::size_t si : finals)
    if (better(states[si].tp, states[si].edits, states[best])) best = si;

  Selection sel;
  for (int64_t si = static_cast<int64_t>(best); states[si].edge >= 0; si = states[si].prev) {
    const auto& e = lat.edges[static_cast<std::size_t>(states[si].edge)];
    if (!e.noop) sel.edits.push_back(e.edit);
  }
  std::reverse(sel.edits.begin(), sel.edits.end());
  sel.counts.tp = static_cast<std::size_t>(states[best].tp);
  sel.counts.fp = sel.edits.size() - sel.counts.tp;
  sel.counts.fn = gold.size() - sel.counts.tp;
  return sel;
}

struct ScorerOptions {
  int max_unchanged_words = 2;
  double beta = 0.5;
  bool case_sensitive = true;
  unsigned workers = 1;  ///< threads for per-sentence alignment
};

struct AnnotatorResult {
  int annotator_id = 0;
  Selection selection;
};

/// Scores one hypothesis against every annotator of a gold block. A block
/// without annotations counts as one annotator with no edits.
inline std::vector<AnnotatorResult> score_sentence(const M2Block& gold,
                                                   std::span<const std::string> hypothesis,
                                                   const ScorerOptions& opt = {}) {
  std::vector<std::string> src = gold.source.tokens;
  std::vector<std::string> hyp(hypothesis.begin(), hypothesis.end());
  if (!opt.case_sensitive) {
    for (auto& t : src) t = unicode::lower(t);
    for (auto& t : hyp) t = unicode::lower(t);
  }
  const EditLattice lat = align(src, hyp, opt.max_unchanged_words);
  std::vector<int> ids = gold.annotators();
  if (ids.empty()) ids.push_back(0);
  std::vector<AnnotatorResult> out;
  for (int id : ids) {
    const auto ann = gold.by_annotator(id);
    auto g = gold_edit_set(ann, !opt.case_sensitive);
    // Edits that leave their span unchanged (e.g. case fixes once folded)
    // are not edits.
    std::erase_if(g, [&](const EditSpan& e) {
      if (e.end > src.size()) return false;
      std::string span;
      for (std::size_t i = e.start; i < e.end; ++i) span += (i > e.start ? " " : "") + src[i];
      return e.start < e.end && span == e.replacement;
    });
    out.push_back({id, best_edit_selection(lat, g)});
  }
  return out;
}

struct ScoreReport {
  double beta = 0.5;
  EditCounts overall;
  std::map<std::string, EditCounts> per_domain;
  std::vector<int> chosen_annotator;  ///< per sentence

  double precision() const { return czgec::precision(overall); }
  double recall() const { return czgec::recall(overall); }
  double f_beta() const { return czgec::f_beta(overall, beta); }
};

/// Accumulates sentence results in input order. For each sentence the
/// annotator maximizing F_beta of the running totals plus that sentence is
/// kept; ties go to more true positives, then to the earlier annotator.
inline ScoreReport accumulate(std::span<const std::vector<AnnotatorResult>> per_sentence,
                              std::span<const std::string> domains, double beta) {
  ScoreReport rep;
  rep.beta = beta;
  for (std::size_t s = 0; s < per_sentence.size(); ++s) {
    const auto& cands = per_sentence[s];
    std::size_t best = 0;
    double best_f = -1;
    for (std::size_t a = 0; a < cands.size(); ++a) {
      const double f = f_beta(rep.overall + cands[a].selection.counts, beta);
      if (f > best_f || (f == best_f && cands[a].selection.counts.tp > cands[best].selection.counts.tp)) {
        best = a;
        best_f = f;
      }
    }
    rep.overall += cands[best].selection.counts;
    rep.chosen_annotator.push_back(cands[best].annotator_id);
    if (!domains.empty()) rep.per_domain[domains[s]] += cands[best].selection.counts;
  }
  return rep;
}

/// Scores a corpus. `domains` is empty or holds one id per sentence.
inline ScoreReport score_corpus(std::span<const M2Block> gold,
                                std::span<const std::vector<std::string>> hypotheses,
                                std::span<const std::string> domains = {},
                                const ScorerOptions& opt = {}) {
  if (gold.size() != hypotheses.size())
    throw Error("gold has " + std::to_string(gold.size()) + " sentences but hypotheses have " +
                std::to_string(hypotheses.size()));
  if (!domains.empty() && domains.size() != gold.size())
    throw Error("domain sidecar has " + std::to_string(domains.size()) + " lines for " +
                std::to_string(gold.size()) + " sentences");
  for (const auto& h : hypotheses)
    for (const auto& t : h)
      if (t.empty() || has_line_control(t)) throw Error("hypothesis token with tab or newline");

  std::vector<std::vector<AnnotatorResult>> results(gold.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(gold.size())));
  if (workers <= 1) {
    for (std::size_t s = 0; s < gold.size(); ++s) results[s] = score_sentence(gold[s], hypotheses[s], opt);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < gold.size(); s += workers)
          results[s] = score_sentence(gold[s], hypotheses[s], opt);
      });
  }
  return accumulate(results, domains, opt.beta);
}

/// Rounds half away from zero at four decimals for display.
inline std::string format_score(double x) {
  const double r = std::floor(x * 10000.0 + 0.5) / 10000.0;
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << r;
  return out.str();
}

inline std::string format_report(const ScoreReport& r) {
  std::ostringstream out;
  const std::string fname = "F" + [&] {
    std::ostringstream b;
    b << r.beta;
    return b.str();
  }();
  auto line = [&](const std::string& label, const EditCounts& c) {
    out << std::left << std::setw(10) << label << " TP " << c.tp << "  FP " << c.fp << "  FN "
        << c.fn << "  Precision " << format_score(precision(c)) << "  Recall "
        << format_score(recall(c)) << "  " << fname << " " << format_score(f_beta(c, r.beta))
        << '\n';
  };
  line("overall", r.overall);
  for (const auto& [d, c] : r.per_domain) line(d, c);
  return out.str();
}

inline nlohmann::json counts_json(const EditCounts& c, double beta) {
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"precision", precision(c)},
          {"recall", recall(c)},
          {"f_beta", f_beta(c, beta)}};
}

/// {"beta": b, "overall": {...}, "per_domain": {"NF": {...}, ...}} where each
/// entry holds tp, fp, fn, precision, recall and f_beta at full precision.
inline nlohmann::json to_json(const ScoreReport& r) {
  nlohmann::json j;
  j["beta"] = r.beta;
  j["overall"] = counts_json(r.overall, r.beta);
  j["per_domain"] = nlohmann::json::object();
  for (const auto& [d, c] : r.per_domain) j["per_domain"][d] = counts_json(c, r.beta);
  return j;
}

}  // namespace czgec
