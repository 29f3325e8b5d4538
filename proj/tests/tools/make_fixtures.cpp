// Regenerates the synthetic CSV/CoNLL-U fixtures under tests/data.
//   make_fixtures <tests/data dir>

#include <iostream>
#include <string>

#include "support/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  const auto corpus = synth::make({{"F", 60}, {"SE", 18}, {"US", 12}, {"O", 11}, {"PE", 10}, {"LF", 7},
                                   {"A", 5}, {"MN", 4}, {"SC", 4}, {"FT", 3}, {"L", 3}, {"PO", 2}},
                                  12, 2024, 0.15);
  synth::write(corpus, dir + "/synthetic.csv", dir + "/synthetic.conllu");

  // Same rows, every tenth annotation block removed.
  auto gappy = corpus;
  for (std::size_t i = 0; i < gappy.dataset.requirements.size(); i += 10)
    gappy.annotations.erase(gappy.dataset.requirements[i].req_id);
  std::ofstream out(dir + "/synthetic_gaps.conllu", std::ios::binary);
  for (const auto& r : gappy.dataset.requirements)
    if (gappy.annotations.contains(r.req_id)) out << hc4rc::to_conllu(gappy.annotations.at(r.req_id));

  const auto single = synth::make({{"F", 12}}, 2, 5);
  synth::write(single, dir + "/single_class.csv", dir + "/single_class.conllu");
  return 0;
}
