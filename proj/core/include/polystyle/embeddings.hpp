#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace polystyle {

class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(words_.size()); }
    bool contains(const std::string& word) const { return index_.count(word) != 0; }
    const std::vector<double>* vector_of(const std::string& word) const;
    const std::vector<std::string>& words() const { return words_; }

    void insert(const std::string& word, std::vector<double> vec);

    // Mean of word vectors over all tokens; tokens without an entry are
    // skipped. Returns an empty vector when nothing matched.
    std::vector<double> sentence_embedding(const std::vector<std::string>& tokens) const;

    // Text format: word followed by dim floats, one entry per line.
    void save(const std::string& path) const;
    static EmbeddingTable load(const std::string& path);

private:
    int dim_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<double>> vectors_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct EmbeddingTrainConfig {
    int dim = 64;
    int epochs = 5;
    int window = 2;
    int negatives = 5;
    double learning_rate = 0.05;
    uint64_t seed = 1;
};

// Skip-gram with negative sampling over the combined corpus; deterministic
// for a fixed seed.
EmbeddingTable train_embeddings(const std::vector<std::vector<std::string>>& sentences,
                                const EmbeddingTrainConfig& config);
EmbeddingTable train_embeddings(const std::vector<std::vector<std::string>>& sentences,
                                int dim, int epochs, uint64_t seed);

}  // namespace polystyle
