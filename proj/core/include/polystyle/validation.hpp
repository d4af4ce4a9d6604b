#pragma once

#include <memory>
#include <set>

#include "polystyle/embeddings.hpp"
#include "polystyle/metrics.hpp"
#include "polystyle/training.hpp"

namespace polystyle {

// Everything the per-epoch style/content scorer needs; trained once up front.
struct ValidationAssets {
    TextClassifier classifier;
    EmbeddingTable embeddings;
    std::set<std::string> style_words;
};

ValidationAssets build_validation_assets(const CorpusPair& corpus, uint64_t seed,
                                         const ContentScoreConfig& config = {});

// Transfers each validation sentence to the other domain with a seeded donor
// pick and returns (style score, content score) pooled over both directions.
ValidationScorer make_validation_scorer(std::shared_ptr<ValidationAssets> assets,
                                        uint64_t seed);

// Shared by the scorer and the evaluation paths: greedy one-donor transfer of
// every sequence in `inputs`, donors drawn uniformly from `donors` by seed.
struct DirectionOutputs {
    std::vector<std::vector<std::string>> inputs;   // decoded words
    std::vector<std::vector<std::string>> outputs;  // decoded words
};
DirectionOutputs transfer_direction(const ModelParams& params, const Vocabulary& vocab,
                                    const std::vector<std::vector<int>>& inputs,
                                    const std::vector<std::vector<int>>& donors,
                                    int source_domain, uint64_t seed);

}  // namespace polystyle
