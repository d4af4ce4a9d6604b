#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polystyle/corpus.hpp"

namespace polystyle::testsupport {

// Templated two-style review corpus (~38-word vocabulary): both styles share
// nouns, glue words and intensifiers; polarity adjectives are swapped between
// the styles. Domain 1 is negative, domain 2 positive.
struct SyntheticCorpus {
    std::vector<std::vector<std::string>> domain1;
    std::vector<std::vector<std::string>> domain2;
};

SyntheticCorpus make_synthetic_corpus(int sentences_per_style, uint64_t seed);

// Encoded pair with a vocabulary built from the generated sentences.
CorpusPair make_synthetic_pair(int sentences_per_style, uint64_t seed, int max_len = 25);

const std::vector<std::string>& positive_adjectives();
const std::vector<std::string>& negative_adjectives();

void write_lines(const std::string& path, const std::vector<std::vector<std::string>>& sents);

}  // namespace polystyle::testsupport
