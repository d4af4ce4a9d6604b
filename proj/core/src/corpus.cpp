#include "polystyle/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace polystyle {

namespace {

const char* kSpecialTokens[4] = {"<pad>", "<bos>", "<eos>", "<unk>"};

}  // namespace

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

// ---- Vocabulary ---------------------------------------------------------------

Vocabulary::Vocabulary() {
    for (const char* s : kSpecialTokens) push(s);
}

void Vocabulary::push(const std::string& token) {
    token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
    id_to_token_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpora,
                             int min_count) {
    std::map<std::string, long long> freq;
    long long seen = 0;
    for (const auto& sent : corpora) {
        for (const auto& tok : sent) {
            ++freq[tok];
            ++seen;
        }
    }
    if (seen == 0) throw std::runtime_error("build_vocab: empty corpus");
    std::vector<std::pair<std::string, long long>> items(freq.begin(), freq.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocabulary v;
    for (const auto& [tok, cnt] : items) {
        if (cnt >= min_count) v.push(tok);
    }
    return v;
}

Vocabulary Vocabulary::build_from_files(const std::string& path1, const std::string& path2,
                                        int min_count) {
    auto s1 = read_sentences(path1);
    auto s2 = read_sentences(path2);
    s1.insert(s1.end(), s2.begin(), s2.end());
    return build(s1, min_count);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& id_to_token) {
    if (id_to_token.size() < 4) {
        throw std::invalid_argument("vocabulary: token list misses the specials");
    }
    for (int i = 0; i < 4; ++i) {
        if (id_to_token[static_cast<size_t>(i)] != kSpecialTokens[i]) {
            throw std::invalid_argument("vocabulary: token list does not start with the specials");
        }
    }
    Vocabulary v;
    for (size_t i = 4; i < id_to_token.size(); ++i) v.push(id_to_token[i]);
    return v;
}

int Vocabulary::id_of(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
    if (id < 0 || id >= size()) {
        throw std::invalid_argument("vocabulary: id " + std::to_string(id) + " out of range");
    }
    return id_to_token_[static_cast<size_t>(id)];
}

bool Vocabulary::contains(const std::string& token) const {
    return token_to_id_.count(token) != 0;
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size() + 2);
    ids.push_back(kBos);
    for (const auto& t : tokens) ids.push_back(id_of(t));
    ids.push_back(kEos);
    return ids;
}

std::vector<std::string> Vocabulary::decode(const std::vector<int>& ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) {
        if (id == kPad || id == kBos || id == kEos) continue;
        out.push_back(token_of(id));
    }
    return out;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("vocabulary: cannot write " + path);
    for (const auto& tok : id_to_token_) f << tok << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("vocabulary: cannot read " + path);
    Vocabulary v;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        if (lineno < 4) {
            if (line != kSpecialTokens[lineno]) {
                throw std::runtime_error("vocabulary: " + path + " line " +
                                         std::to_string(lineno) + " is not the expected special");
            }
        } else {
            v.push(line);
        }
        ++lineno;
    }
    if (lineno < 4) throw std::runtime_error("vocabulary: " + path + " is truncated");
    return v;
}

uint64_t Vocabulary::content_hash() const {
    uint64_t h = 1469598103934665603ull;
    for (const auto& tok : id_to_token_) {
        h = fnv1a64(tok.data(), tok.size(), h);
        h = fnv1a64("\n", 1, h);
    }
    return h;
}

// ---- tokenization ---------------------------------------------------------------

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::vector<std::vector<std::string>> read_sentences(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("corpus: cannot read " + path);
    std::vector<std::vector<std::string>> out;
    std::string line;
    while (std::getline(f, line)) {
        auto toks = tokenize(line);
        if (!toks.empty()) out.push_back(std::move(toks));
    }
    return out;
}

// ---- CorpusPair -----------------------------------------------------------------

void CorpusPair::validate() const {
    const int v = vocab.size();
    if (max_len < 1) throw std::invalid_argument("corpus: max_len must be >= 1");
    for (const auto* dom : {&domain1, &domain2}) {
        for (const auto& seq : *dom) {
            if (seq.empty() || static_cast<int>(seq.size()) > max_len) {
                throw std::invalid_argument("corpus: sequence length outside [1,max_len]");
            }
            for (int id : seq) {
                if (id < 0 || id >= v) {
                    throw std::invalid_argument("corpus: token id " + std::to_string(id) +
                                                " outside vocabulary");
                }
            }
        }
    }
}

namespace {

std::vector<std::vector<int>> encode_raw(const std::vector<std::vector<std::string>>& sents,
                                         const Vocabulary& vocab, int max_len, int* dropped) {
    std::vector<std::vector<int>> out;
    out.reserve(sents.size());
    for (const auto& s : sents) {
        if (s.empty()) continue;
        if (static_cast<int>(s.size()) > max_len) {
            ++*dropped;
            continue;
        }
        std::vector<int> ids;
        ids.reserve(s.size());
        for (const auto& t : s) ids.push_back(vocab.id_of(t));
        out.push_back(std::move(ids));
    }
    return out;
}

}  // namespace

CorpusPair make_corpus_pair(const std::vector<std::vector<std::string>>& sents1,
                            const std::vector<std::vector<std::string>>& sents2,
                            const Vocabulary& vocab, int max_len) {
    CorpusPair cp;
    cp.vocab = vocab;
    cp.max_len = max_len;
    cp.domain1 = encode_raw(sents1, vocab, max_len, &cp.dropped_too_long);
    cp.domain2 = encode_raw(sents2, vocab, max_len, &cp.dropped_too_long);
    cp.validate();
    return cp;
}

CorpusPair load_corpus_pair(const std::string& path1, const std::string& path2,
                            const Vocabulary& vocab, int max_len) {
    return make_corpus_pair(read_sentences(path1), read_sentences(path2), vocab, max_len);
}

CorpusSplit split_validation(const CorpusPair& corpus, double fraction, uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("split_validation: fraction must be in [0,1)");
    }
    CorpusSplit out;
    out.train.vocab = out.validation.vocab = corpus.vocab;
    out.train.max_len = out.validation.max_len = corpus.max_len;
    std::mt19937_64 rng(seed);
    auto split_one = [&](const std::vector<std::vector<int>>& all,
                         std::vector<std::vector<int>>& train,
                         std::vector<std::vector<int>>& val) {
        std::vector<size_t> order(all.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        const size_t n_val = static_cast<size_t>(fraction * static_cast<double>(all.size()));
        for (size_t i = 0; i < order.size(); ++i) {
            (i < n_val ? val : train).push_back(all[order[i]]);
        }
    };
    split_one(corpus.domain1, out.train.domain1, out.validation.domain1);
    split_one(corpus.domain2, out.train.domain2, out.validation.domain2);
    return out;
}

// ---- batching ------------------------------------------------------------------

std::vector<int> Batch::row(int r) const {
    const int len = lengths[static_cast<size_t>(r)];
    std::vector<int> out(len);
    for (int i = 0; i < len; ++i) out[static_cast<size_t>(i)] = ids[static_cast<size_t>(r) * width + i];
    return out;
}

std::vector<Batch> make_batches(const std::vector<std::vector<int>>& sequences,
                                int batch_size, uint64_t seed) {
    if (batch_size < 1) throw std::invalid_argument("batch: batch_size must be >= 1");
    std::vector<size_t> order(sequences.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<Batch> batches;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(batch_size)) {
        const size_t end = std::min(order.size(), start + static_cast<size_t>(batch_size));
        Batch b;
        b.rows = static_cast<int>(end - start);
        for (size_t i = start; i < end; ++i) {
            b.width = std::max(b.width, static_cast<int>(sequences[order[i]].size()));
        }
        b.ids.assign(static_cast<size_t>(b.rows) * b.width, kPad);
        for (size_t i = start; i < end; ++i) {
            const auto& seq = sequences[order[i]];
            const size_t r = i - start;
            b.lengths.push_back(static_cast<int>(seq.size()));
            std::copy(seq.begin(), seq.end(), b.ids.begin() + r * static_cast<size_t>(b.width));
        }
        batches.push_back(std::move(b));
    }
    return batches;
}

// ---- n-gram statistics ------------------------------------------------------------

long long NgramStats::count(int domain, const std::string& key) const {
    const auto& m = counts[domain - 1];
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
}

long long NgramStats::total(int domain) const {
    long long t = 0;
    for (const auto& [k, c] : counts[domain - 1]) t += c;
    return t;
}

namespace {

void count_into(const std::vector<std::vector<std::string>>& corpus, int n,
                std::map<std::string, long long>& out) {
    for (const auto& sent : corpus) {
        if (static_cast<int>(sent.size()) < n) continue;
        for (size_t i = 0; i + static_cast<size_t>(n) <= sent.size(); ++i) {
            std::string key = sent[i];
            for (int j = 1; j < n; ++j) {
                key.push_back(' ');
                key += sent[i + static_cast<size_t>(j)];
            }
            ++out[key];
        }
    }
}

}  // namespace

NgramStats ngram_counts(const std::vector<std::vector<std::string>>& corpus1,
                        const std::vector<std::vector<std::string>>& corpus2, int n) {
    if (n < 1) throw std::invalid_argument("ngram_counts: n must be >= 1");
    NgramStats stats;
    stats.n = n;
    count_into(corpus1, n, stats.counts[0]);
    count_into(corpus2, n, stats.counts[1]);
    return stats;
}

NgramStats ngram_counts(const CorpusPair& corpus, int n) {
    auto decode_all = [&](const std::vector<std::vector<int>>& dom) {
        std::vector<std::vector<std::string>> out;
        out.reserve(dom.size());
        for (const auto& seq : dom) out.push_back(corpus.vocab.decode(seq));
        return out;
    };
    return ngram_counts(decode_all(corpus.domain1), decode_all(corpus.domain2), n);
}

}  // namespace polystyle
