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

// Noises a few Czech sentences with the MATE preset and prints every
// drawn operation next to the result.

#include <iostream>

#include "czgec/czgec.hpp"

int main() {
  using namespace czgec;
  const Lexicon lexicon({{"kočka", 50}, {"kočky", 20}, {"kočku", 10}, {"pes", 40},
                         {"psi", 15}, {"psů", 5}, {"domů", 30}, {"doma", 25}, {"jdu", 12},
                         {"a", 100}, {"se", 90}, {"že", 60}});
  const std::vector<std::pair<std::string, std::string>> morph_pairs = {
      {"pes", "pes"}, {"psa", "pes"}, {"psi", "pes"}, {"psů", "pes"},
      {"kočka", "kočka"}, {"kočky", "kočka"}, {"kočku", "kočka"}};
  const MorphLexicon morph(morph_pairs);
  const auto insertions = InsertionVocabulary::from_lexicon(lexicon);

  NoiseProfile profile = preset_profile(NoisePreset::kMate);
  profile.token_pass.rate_mean = 0.3;
  profile.normalize();
  const Noiser noiser(profile, Providers{&lexicon, &morph, &insertions}, RuleSet(default_czech_rules()));

  const char* lines[] = {"Psi štěkají, když jdu domů.", "Kočka spí doma a já jsem rád.",
                         "Bychom mohli jít spolu, řekl mně."};
  uint64_t index = 0;
  for (const char* line : lines) {
    const auto pair = noiser(make_sentence(line), /*seed=*/42, index);
    std::cout << pair.noisy.text() << "\t" << pair.clean.text() << "\n";
    for (const auto& op : pair.ops)
      std::cout << "  " << to_string(op.pass) << " " << op.name() << " @" << op.token_index
                << (op.status == OpStatus::kApplied ? "" : " (skipped)") << "\n";
    ++index;
  }
}
