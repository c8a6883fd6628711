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

// Scores one corrected sentence against a two-annotator M2 block.

#include <iostream>
#include <sstream>

#include "czgec/czgec.hpp"

int main() {
  using namespace czgec;
  std::istringstream m2(
      "S Já jsem to udělal pro tebe a pro mně .\n"
      "A 8 9|||Spell|||mě|||REQUIRED|||-NONE-|||0\n"
      "A 4 4|||Punct|||,|||REQUIRED|||-NONE-|||1\n"
      "A 8 9|||Spell|||mě|||REQUIRED|||-NONE-|||1\n");
  const auto gold = parse_m2(m2);
  const std::vector<std::vector<std::string>> hyp = {
      tokenize("Já jsem to udělal pro tebe a pro mě .", Tokenization::kWhitespace)};

  const auto lattice = align(gold[0].source.tokens, hyp[0]);
  std::cout << "candidate edits:\n";
  for (const auto& e : lattice.candidate_edits())
    std::cout << "  (" << e.start << "," << e.end << ") -> '" << e.replacement << "'\n";

  const auto report = score_corpus(gold, hyp);
  std::cout << format_report(report) << to_json(report).dump(2) << "\n";
}
