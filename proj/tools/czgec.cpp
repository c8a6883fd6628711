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

// czgec: synthetic GEC data generation, domain mixing and M2 scoring.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "czgec/czgec.hpp"

namespace fs = std::filesystem;
using namespace czgec;

namespace {

struct NoiseFlags {
  std::string preset = "mate";
  std::string profile;
  std::string lexicon;
  std::string morph_lexicon;
  std::string insertions;
  std::string rules;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "aspell | morphodita | typical | mate")
        ->capture_default_str();
    cmd->add_option("--profile", profile, "noise profile file (overrides --preset)");
    cmd->add_option("--lexicon", lexicon, "word list for dictionary substitutions");
    cmd->add_option("--morph-lexicon", morph_lexicon, "form<TAB>lemma morphological lexicon");
    cmd->add_option("--insertions", insertions,
                    "word<TAB>frequency list for inserted words (default: --lexicon)");
    cmd->add_option("--rules", rules, "typical-error rule table (default: built-in Czech rules)");
  }
};

/// Owns provider data for the lifetime of a command.
struct LoadedNoise {
  std::unique_ptr<Lexicon> lexicon;
  std::unique_ptr<MorphLexicon> morph;
  std::unique_ptr<InsertionVocabulary> insertions;
  std::unique_ptr<Noiser> noiser;
};

void warn(const std::string& msg) { std::cerr << "czgec: warning: " << msg << '\n'; }

LoadedNoise load_noise(const NoiseFlags& f) {
  LoadedNoise out;
  NoiseProfile profile;
  std::vector<std::string> warnings;
  if (!f.profile.empty()) {
    profile = load_profile(f.profile, &warnings);
  } else {
    auto preset = parse_preset(f.preset);
    if (!preset) throw Error("unknown preset '" + f.preset + "'");
    profile = preset_profile(*preset);
    warnings = profile.normalize();
  }
  for (const auto& w : warnings) warn(w);

  if (!f.lexicon.empty()) out.lexicon = std::make_unique<Lexicon>(Lexicon::load(f.lexicon));
  if (!f.morph_lexicon.empty())
    out.morph = std::make_unique<MorphLexicon>(MorphLexicon::load(f.morph_lexicon));
  if (!f.insertions.empty())
    out.insertions = std::make_unique<InsertionVocabulary>(InsertionVocabulary::load(f.insertions));
  else if (out.lexicon)
    out.insertions = std::make_unique<InsertionVocabulary>(InsertionVocabulary::from_lexicon(*out.lexicon));

  const auto& w = profile.token_pass.op_weights;
  if (w[static_cast<std::size_t>(TokenOp::kSubAspell)] > 0 && !out.lexicon)
    warn("no --lexicon: sub_aspell draws will be skipped");
  if (w[static_cast<std::size_t>(TokenOp::kSubMorph)] > 0 && !out.morph)
    warn("no --morph-lexicon: sub_morph draws will be skipped");
  if (w[static_cast<std::size_t>(TokenOp::kInsert)] > 0 && !out.insertions)
    warn("no insertion vocabulary: ins draws will be skipped");

  RuleSet rules;
  if (profile.typical_errors_enabled) {
    if (!f.rules.empty()) rules = RuleSet(load_rules(f.rules));
    else if (profile.rule_set_path) rules = RuleSet(load_rules(*profile.rule_set_path));
    else rules = RuleSet(default_czech_rules());
  }
  Providers providers;
  providers.lexicon = out.lexicon.get();
  providers.morph = out.morph.get();
  providers.insertions = out.insertions.get();
  out.noiser = std::make_unique<Noiser>(std::move(profile), providers, std::move(rules));
  return out;
}

/// Output file or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") {
      stream_ = &std::cout;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot open " + path + " for writing");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw Error("write error");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

int run_generate(const std::string& corpus, const NoiseFlags& nf, uint64_t seed, unsigned workers,
                 const std::string& out_path, bool log_ops, const std::string& ops_path,
                 bool pretokenized) {
  auto noise = load_noise(nf);
  SentenceReader reader(corpus,
                        pretokenized ? Tokenization::kWhitespace : Tokenization::kPunctuation);
  Output out(out_path);
  std::optional<Output> ops;
  if (log_ops || !ops_path.empty()) {
    std::string p = ops_path;
    if (p.empty()) {
      if (out_path.empty() || out_path == "-")
        throw Error("--log-ops with output on stdout needs --ops-out");
      p = out_path + ".ops";
    }
    ops.emplace(p);
  }
  GenerateOptions opt{seed, workers};
  const auto n = generate(reader, *noise.noiser, opt, out.get(), ops ? &ops->get() : nullptr);
  out.finish();
  if (ops) ops->finish();
  std::cerr << "czgec: generated " << n << " pairs\n";
  return 0;
}

int run_mix(const std::string& manifest, double factor, const std::string& ratio_text,
            uint64_t seed, std::size_t count, const std::string& out_path,
            std::size_t shuffle_buffer, const std::string& synthetic_path,
            const std::string& synthetic_id, const NoiseFlags& nf) {
  std::vector<std::string> warnings;
  MixPlan plan;
  plan.domains = load_domain_manifest(manifest, &warnings);
  for (const auto& w : warnings) warn(w);
  std::erase_if(plan.domains, [](const DomainCorpus& d) { return d.size == 0; });
  if (plan.domains.empty()) throw Error("manifest has no non-empty domains");
  plan.factor = factor;
  plan.synthetic_ratio = Ratio::parse(ratio_text);
  plan.shuffle_buffer = shuffle_buffer;
  plan.validate();

  DomainSampler sampler(plan, seed);
  std::optional<LoadedNoise> noise;
  std::optional<DomainStream> synthetic;
  uint64_t synthetic_index = 0;
  if (plan.synthetic_ratio.num > 0) {
    if (synthetic_path.empty()) throw Error("--ratio above 0 needs --synthetic corpus");
    noise.emplace(load_noise(nf));
    DomainCorpus syn{synthetic_id, synthetic_path, count_sentences(synthetic_path)};
    if (syn.size == 0) throw Error("synthetic corpus is empty");
    synthetic.emplace(std::move(syn), seed, plan.domains.size(), shuffle_buffer);
  }

  using Line = std::pair<std::string, TextPair>;
  MixedStream<Line>::Source syn_source;
  if (synthetic) {
    syn_source = [&]() -> std::optional<Line> {
      const TextPair clean_line = synthetic->next();
      const Sentence clean = make_sentence(clean_line.target);
      auto pair = (*noise->noiser)(clean, seed, synthetic_index++);
      return Line{synthetic_id, {pair.noisy.text(), pair.clean.text()}};
    };
  }
  MixedStream<Line> mixed(
      std::move(syn_source),
      [&]() -> std::optional<Line> {
        auto item = sampler.next();
        return Line{std::move(item.domain_id), std::move(item.pair)};
      },
      plan.synthetic_ratio);

  Output out(out_path);
  for (std::size_t i = 0; i < count; ++i) {
    auto item = mixed.next();
    if (!item) break;
    const auto& [domain, pair] = item->value;
    if (has_line_control(domain)) throw Error("bad domain id");
    out.get() << domain << '\t';
    write_pair(out.get(), pair.source, pair.target);
  }
  out.finish();
  return 0;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

int run_score(const std::string& gold_path, const std::string& hyp_path,
              const std::string& domains_path, double beta, int max_unchanged, bool ignore_case,
              const std::string& json_path, unsigned workers) {
  const auto gold = parse_m2(fs::path(gold_path));
  std::vector<std::vector<std::string>> hyps;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(hyp_path)) {
    ++line_no;
    if (line.find('\t') != std::string::npos)
      throw ParseError(hyp_path, line_no, "tab inside hypothesis");
    if (!unicode::is_valid_utf8(line)) throw ParseError(hyp_path, line_no, "malformed UTF-8");
    hyps.push_back(tokenize(unicode::nfc(line), Tokenization::kWhitespace));
  }
  std::vector<std::string> domains;
  if (!domains_path.empty()) domains = read_lines(domains_path);

  ScorerOptions opt;
  opt.beta = beta;
  opt.max_unchanged_words = max_unchanged;
  opt.case_sensitive = !ignore_case;
  opt.workers = workers;
  const ScoreReport report = score_corpus(gold, hyps, domains, opt);
  std::cout << format_report(report);
  if (!json_path.empty()) {
    Output out(json_path);
    out.get() << to_json(report).dump(2) << '\n';
    out.finish();
  }
  return 0;
}

int run_stats(const std::string& tsv_path, const std::string& ops_path) {
  const std::string p = ops_path.empty() ? tsv_path + ".ops" : ops_path;
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("missing op-log sidecar " + p + " (generate with --log-ops)");
  std::cout << format_op_stats(read_op_log(in, p));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"czgec: synthetic Czech GEC data, domain mixing and M2 scoring"};
  app.require_subcommand(1);

  uint64_t seed = 42;
  unsigned workers = default_workers();
  std::string out_path = "-";

  // generate
  auto* gen = app.add_subcommand("generate", "noise a clean corpus into noisy<TAB>clean pairs");
  std::string corpus;
  NoiseFlags gen_noise;
  bool log_ops = false, pretokenized = false;
  std::string ops_out;
  gen->add_option("corpus", corpus, "one sentence per line, UTF-8")->required();
  gen_noise.add_to(gen);
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--workers", workers)->check(CLI::PositiveNumber);
  gen->add_option("--out", out_path, "output file, - for stdout")->capture_default_str();
  gen->add_flag("--log-ops", log_ops, "write the op log to <out>.ops");
  gen->add_option("--ops-out", ops_out, "op log path (implies --log-ops)");
  gen->add_flag("--pretokenized", pretokenized, "split input on whitespace only");

  // mix
  auto* mix = app.add_subcommand("mix", "sample domains by size^factor and mix in synthetic data");
  std::string manifest, ratio = "0", synthetic, synthetic_id = "SYN";
  double factor = 1.0;
  std::size_t count = 0, shuffle_buffer = 65536;
  NoiseFlags mix_noise;
  mix->add_option("manifest", manifest, "domain_id<TAB>path lines")->required();
  mix->add_option("--factor", factor, "oversampling exponent")->capture_default_str();
  mix->add_option("--ratio", ratio, "synthetic:gold ratio r (r:1), e.g. 0, 2, 5, 5/2")
      ->capture_default_str();
  mix->add_option("--count", count, "lines to emit")->required();
  mix->add_option("--seed", seed)->capture_default_str();
  mix->add_option("--shuffle-buffer", shuffle_buffer)->check(CLI::PositiveNumber)
      ->capture_default_str();
  mix->add_option("--synthetic", synthetic, "clean corpus noised on the fly for synthetic lines");
  mix->add_option("--synthetic-id", synthetic_id, "domain tag of synthetic lines")
      ->capture_default_str();
  mix->add_option("--out", out_path, "output file, - for stdout")->capture_default_str();
  mix_noise.add_to(mix);

  // score
  auto* score = app.add_subcommand("score", "M2 scoring of system output against gold edits");
  std::string gold_path, hyp_path, domains_path, json_path;
  double beta = 0.5;
  int max_unchanged = 2;
  bool ignore_case = false;
  score->add_option("gold", gold_path, "gold M2 file")->required();
  score->add_option("hypothesis", hyp_path, "one tokenized corrected sentence per line")
      ->required();
  score->add_option("--domains", domains_path, "one domain id per sentence");
  score->add_option("--beta", beta)->capture_default_str();
  score->add_option("--max-unchanged", max_unchanged)->capture_default_str();
  score->add_flag("--ignore-case", ignore_case, "case-insensitive edit matching");
  score->add_option("--json", json_path, "write the structured report here");
  score->add_option("--workers", workers)->check(CLI::PositiveNumber);

  // stats
  auto* stats = app.add_subcommand("stats", "operation frequencies from a generate op log");
  std::string tsv_path, ops_path;
  stats->add_option("generated", tsv_path, "generated TSV (reads <file>.ops)")->required();
  stats->add_option("--ops", ops_path, "op log path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen)
      return run_generate(corpus, gen_noise, seed, workers, out_path, log_ops, ops_out,
                          pretokenized);
    if (*mix)
      return run_mix(manifest, factor, ratio, seed, count, out_path, shuffle_buffer, synthetic,
                     synthetic_id, mix_noise);
    if (*score)
      return run_score(gold_path, hyp_path, domains_path, beta, max_unchanged, ignore_case,
                       json_path, workers);
    if (*stats) return run_stats(tsv_path, ops_path);
  } catch (const std::exception& e) {
    std::cerr << "czgec: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
