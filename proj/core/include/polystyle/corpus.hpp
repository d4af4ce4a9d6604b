#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace polystyle {

// Fixed special token ids; real tokens start at 4.
enum SpecialToken : int { kPad = 0, kBos = 1, kEos = 2, kUnk = 3 };

class Vocabulary {
public:
    Vocabulary();  // specials only

    // Tokens with frequency >= min_count get ids ordered by
    // (frequency desc, lexicographic asc); the rest encode to UNK.
    static Vocabulary build(const std::vector<std::vector<std::string>>& corpora,
                            int min_count);
    static Vocabulary build_from_files(const std::string& path1, const std::string& path2,
                                       int min_count);
    // Rebuilds from a full ordered id->token list (specials first).
    static Vocabulary from_tokens(const std::vector<std::string>& id_to_token);

    int size() const { return static_cast<int>(id_to_token_.size()); }
    int id_of(const std::string& token) const;  // UNK when unknown
    const std::string& token_of(int id) const;
    bool contains(const std::string& token) const;

    // [BOS, ids..., EOS]
    std::vector<int> encode(const std::vector<std::string>& tokens) const;
    // Inverse of encode; drops PAD/BOS/EOS.
    std::vector<std::string> decode(const std::vector<int>& ids) const;

    void save(const std::string& path) const;  // one token per line, specials first
    static Vocabulary load(const std::string& path);

    uint64_t content_hash() const;

private:
    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;
    void push(const std::string& token);
};

// Lowercased whitespace tokenization.
std::vector<std::string> tokenize(const std::string& line);
std::string join_tokens(const std::vector<std::string>& tokens);
std::vector<std::vector<std::string>> read_sentences(const std::string& path);

struct CorpusPair {
    std::vector<std::vector<int>> domain1;  // raw token ids, no BOS/EOS
    std::vector<std::vector<int>> domain2;
    Vocabulary vocab;
    int max_len = 25;
    int dropped_too_long = 0;  // sentences dropped at load time

    void validate() const;
};

// Encodes sentences to raw ids, dropping empties and sentences longer than
// max_len (counted in dropped_too_long).
CorpusPair make_corpus_pair(const std::vector<std::vector<std::string>>& sents1,
                            const std::vector<std::vector<std::string>>& sents2,
                            const Vocabulary& vocab, int max_len = 25);
CorpusPair load_corpus_pair(const std::string& path1, const std::string& path2,
                            const Vocabulary& vocab, int max_len = 25);

// Seeded split into train/validation (fraction per domain held out).
struct CorpusSplit {
    CorpusPair train;
    CorpusPair validation;
};
CorpusSplit split_validation(const CorpusPair& corpus, double fraction, uint64_t seed);

struct Batch {
    std::vector<int> ids;      // row-major [rows x width], PAD right-padded
    std::vector<int> lengths;  // true lengths, excluding padding
    int rows = 0;
    int width = 0;

    std::vector<int> row(int r) const;  // unpadded sequence r
};

// Shuffles by seed, then right-pads each batch to its max length.
std::vector<Batch> make_batches(const std::vector<std::vector<int>>& sequences,
                                int batch_size, uint64_t seed);

// Contiguous n-gram counts for both domains over raw tokens (no BOS/EOS).
// Keys are space-joined token strings.
struct NgramStats {
    int n = 1;
    std::map<std::string, long long> counts[2];

    long long count(int domain, const std::string& key) const;  // domain 1 or 2
    long long total(int domain) const;
};

NgramStats ngram_counts(const std::vector<std::vector<std::string>>& corpus1,
                        const std::vector<std::vector<std::string>>& corpus2, int n);
// Id-based corpora are decoded through the vocabulary first.
NgramStats ngram_counts(const CorpusPair& corpus, int n);

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 1469598103934665603ull);

}  // namespace polystyle
