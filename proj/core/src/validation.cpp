#include "polystyle/validation.hpp"

#include <random>

#include "polystyle/inference.hpp"

namespace polystyle {

ValidationAssets build_validation_assets(const CorpusPair& corpus, uint64_t seed,
                                         const ContentScoreConfig& config) {
    ValidationAssets assets;
    assets.classifier = train_style_classifier(corpus, seed);
    auto decode_all = [&](const std::vector<std::vector<int>>& dom) {
        std::vector<std::vector<std::string>> out;
        out.reserve(dom.size());
        for (const auto& seq : dom) out.push_back(corpus.vocab.decode(seq));
        return out;
    };
    auto sents1 = decode_all(corpus.domain1);
    auto sents2 = decode_all(corpus.domain2);
    std::vector<std::vector<std::string>> all(sents1);
    all.insert(all.end(), sents2.begin(), sents2.end());
    assets.embeddings = train_embeddings(all, 64, 5, seed);
    assets.style_words = detect_style_words(ngram_counts(sents1, sents2, config.n), config);
    return assets;
}

DirectionOutputs transfer_direction(const ModelParams& params, const Vocabulary& vocab,
                                    const std::vector<std::vector<int>>& inputs,
                                    const std::vector<std::vector<int>>& donors,
                                    int source_domain, uint64_t seed) {
    DirectionOutputs out;
    if (inputs.empty() || donors.empty()) return out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, donors.size() - 1);
    for (const auto& raw : inputs) {
        const auto& donor = donors[pick(rng)];
        std::vector<int> ids = transfer_with_donor(params, raw, source_domain, donor);
        std::vector<std::string> words;
        for (int id : ids) words.push_back(vocab.token_of(id));
        out.inputs.push_back(vocab.decode(raw));
        out.outputs.push_back(std::move(words));
    }
    return out;
}

ValidationScorer make_validation_scorer(std::shared_ptr<ValidationAssets> assets,
                                        uint64_t seed) {
    return [assets, seed](const ModelParams& params, const CorpusPair& validation,
                          int epoch) -> std::pair<double, double> {
        const uint64_t epoch_seed = seed + 7919ull * static_cast<uint64_t>(epoch + 1);
        DirectionOutputs d12 = transfer_direction(params, validation.vocab, validation.domain1,
                                                  validation.domain2, 1, epoch_seed);
        DirectionOutputs d21 = transfer_direction(params, validation.vocab, validation.domain2,
                                                  validation.domain1, 2, epoch_seed + 1);
        long long hits = 0, total = 0;
        double content_sum = 0.0;
        auto tally = [&](const DirectionOutputs& dir, int target) {
            for (size_t i = 0; i < dir.outputs.size(); ++i) {
                // The internal scorer bypasses the reporting gate; it only
                // steers the learning-rate schedule.
                if (assets->classifier.predict_label(dir.outputs[i]) == target) ++hits;
                content_sum += content_score(dir.inputs[i], dir.outputs[i],
                                             assets->style_words, assets->embeddings);
                ++total;
            }
        };
        tally(d12, 2);
        tally(d21, 1);
        if (total == 0) return {0.0, 0.0};
        return {100.0 * static_cast<double>(hits) / static_cast<double>(total),
                content_sum / static_cast<double>(total)};
    };
}

}  // namespace polystyle
