#include "polystyle/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace polystyle {

const std::vector<double>* EmbeddingTable::vector_of(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : &vectors_[static_cast<size_t>(it->second)];
}

void EmbeddingTable::insert(const std::string& word, std::vector<double> vec) {
    if (dim_ == 0) dim_ = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != dim_) {
        throw std::invalid_argument("embeddings: vector for '" + word + "' has dimension " +
                                    std::to_string(vec.size()) + ", table uses " +
                                    std::to_string(dim_));
    }
    if (index_.count(word)) throw std::invalid_argument("embeddings: duplicate word '" + word + "'");
    index_.emplace(word, static_cast<int>(words_.size()));
    words_.push_back(word);
    vectors_.push_back(std::move(vec));
}

std::vector<double> EmbeddingTable::sentence_embedding(
    const std::vector<std::string>& tokens) const {
    std::vector<double> sum(static_cast<size_t>(dim_), 0.0);
    int matched = 0;
    for (const auto& tok : tokens) {
        const auto* v = vector_of(tok);
        if (!v) continue;
        for (int i = 0; i < dim_; ++i) sum[static_cast<size_t>(i)] += (*v)[static_cast<size_t>(i)];
        ++matched;
    }
    if (matched == 0) return {};
    for (double& x : sum) x /= matched;
    return sum;
}

void EmbeddingTable::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("embeddings: cannot write " + path);
    f.precision(17);
    for (size_t i = 0; i < words_.size(); ++i) {
        f << words_[i];
        for (double v : vectors_[i]) f << ' ' << v;
        f << '\n';
    }
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("embeddings: cannot read " + path);
    EmbeddingTable table;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string word;
        is >> word;
        std::vector<double> vec;
        double v;
        while (is >> v) vec.push_back(v);
        if (vec.empty()) throw std::runtime_error("embeddings: malformed line in " + path);
        table.insert(word, std::move(vec));
    }
    if (table.size() == 0) throw std::runtime_error("embeddings: " + path + " is empty");
    return table;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty() || a.size() != b.size()) return -1.0;
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return -1.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbeddingTable train_embeddings(const std::vector<std::vector<std::string>>& sentences,
                                const EmbeddingTrainConfig& config) {
    if (config.dim < 1 || config.epochs < 1 || config.window < 1 || config.negatives < 0) {
        throw std::invalid_argument("train_embeddings: invalid configuration");
    }
    // Deterministic vocabulary ordering: frequency desc, then lexicographic.
    std::map<std::string, long long> freq;
    long long total_tokens = 0;
    for (const auto& s : sentences) {
        for (const auto& t : s) {
            ++freq[t];
            ++total_tokens;
        }
    }
    if (total_tokens < config.window + 1) {
        throw std::invalid_argument("train_embeddings: corpus smaller than the context window");
    }
    std::vector<std::pair<std::string, long long>> items(freq.begin(), freq.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> vocab;
    std::unordered_map<std::string, int> index;
    std::vector<double> weights;  // unigram^0.75 negative-sampling table
    for (const auto& [w, c] : items) {
        index.emplace(w, static_cast<int>(vocab.size()));
        vocab.push_back(w);
        weights.push_back(std::pow(static_cast<double>(c), 0.75));
    }
    const int v = static_cast<int>(vocab.size());
    const int d = config.dim;

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> init(-0.5 / d, 0.5 / d);
    std::vector<double> in(static_cast<size_t>(v) * d);
    std::vector<double> out(static_cast<size_t>(v) * d, 0.0);
    for (double& x : in) x = init(rng);

    std::discrete_distribution<int> negatives(weights.begin(), weights.end());
    const double lr = config.learning_rate;
    std::vector<double> grad_center(static_cast<size_t>(d));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& sent : sentences) {
            std::vector<int> ids;
            ids.reserve(sent.size());
            for (const auto& t : sent) ids.push_back(index.at(t));
            const int n = static_cast<int>(ids.size());
            for (int pos = 0; pos < n; ++pos) {
                const int center = ids[static_cast<size_t>(pos)];
                double* vc = in.data() + static_cast<size_t>(center) * d;
                for (int off = -config.window; off <= config.window; ++off) {
                    if (off == 0) continue;
                    const int cpos = pos + off;
                    if (cpos < 0 || cpos >= n) continue;
                    const int context = ids[static_cast<size_t>(cpos)];
                    std::fill(grad_center.begin(), grad_center.end(), 0.0);
                    for (int s = 0; s < config.negatives + 1; ++s) {
                        const bool positive = s == 0;
                        const int target = positive ? context : negatives(rng);
                        double* vo = out.data() + static_cast<size_t>(target) * d;
                        double dot = 0;
                        for (int i = 0; i < d; ++i) dot += vc[i] * vo[i];
                        const double pred = 1.0 / (1.0 + std::exp(-dot));
                        const double err = (positive ? 1.0 : 0.0) - pred;
                        for (int i = 0; i < d; ++i) {
                            grad_center[static_cast<size_t>(i)] += err * vo[i];
                            vo[i] += lr * err * vc[i];
                        }
                    }
                    for (int i = 0; i < d; ++i) vc[i] += lr * grad_center[static_cast<size_t>(i)];
                }
            }
        }
    }

    EmbeddingTable table(d);
    for (int w = 0; w < v; ++w) {
        table.insert(vocab[static_cast<size_t>(w)],
                     std::vector<double>(in.begin() + static_cast<size_t>(w) * d,
                                         in.begin() + static_cast<size_t>(w + 1) * d));
    }
    return table;
}

EmbeddingTable train_embeddings(const std::vector<std::vector<std::string>>& sentences,
                                int dim, int epochs, uint64_t seed) {
    EmbeddingTrainConfig cfg;
    cfg.dim = dim;
    cfg.epochs = epochs;
    cfg.seed = seed;
    return train_embeddings(sentences, cfg);
}

}  // namespace polystyle
