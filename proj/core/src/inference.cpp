#include "polystyle/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace polystyle {

void SamplingConfig::validate() const {
    if (num_variants < 1) throw std::invalid_argument("sampling: num_variants must be >= 1");
    if (beam_width < 1) throw std::invalid_argument("sampling: beam_width must be >= 1");
    if (scheme == SamplingScheme::kRetrieval && pool_size < num_variants) {
        throw std::invalid_argument("sampling: pool_size must be >= num_variants for retrieval");
    }
}

SamplingScheme parse_sampling_scheme(const std::string& name) {
    if (name == "uniform") return SamplingScheme::kUniform;
    if (name == "retrieval") return SamplingScheme::kRetrieval;
    throw std::invalid_argument("sampling: unknown scheme '" + name + "'");
}

std::string to_string(SamplingScheme scheme) {
    return scheme == SamplingScheme::kUniform ? "uniform" : "retrieval";
}

// ---- decoding -----------------------------------------------------------------

namespace {

int argmax_index(const std::vector<double>& probs) {
    int best = 0;
    for (size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[static_cast<size_t>(best)]) best = static_cast<int>(i);
    }
    return best;
}

std::vector<int> strip_frame(std::vector<int> prefix) {
    // prefix = [BOS, tokens..., maybe EOS]
    std::vector<int> out;
    for (size_t i = 1; i < prefix.size(); ++i) {
        if (prefix[i] == kEos) break;
        out.push_back(prefix[i]);
    }
    return out;
}

}  // namespace

std::vector<int> greedy_search(const StepFn& step, int max_tokens) {
    std::vector<int> prefix{kBos};
    for (int t = 0; t < max_tokens + 1; ++t) {  // +1 leaves room for EOS
        const int next = argmax_index(step(prefix));
        prefix.push_back(next);
        if (next == kEos) break;
        if (static_cast<int>(prefix.size()) - 1 >= max_tokens) break;
    }
    return strip_frame(std::move(prefix));
}

std::vector<int> beam_search(const StepFn& step, int max_tokens, int beam_width) {
    if (beam_width < 1) throw std::invalid_argument("beam_search: beam_width must be >= 1");
    struct Hyp {
        std::vector<int> prefix;
        double log_prob = 0.0;
        bool finished = false;
        double normalized() const {
            const auto len = static_cast<double>(prefix.size() - 1);  // exclude BOS
            return log_prob / std::max(1.0, len);
        }
    };
    std::vector<Hyp> beam{Hyp{{kBos}, 0.0, false}};
    for (int t = 0; t < max_tokens + 1; ++t) {
        bool all_done = true;
        std::vector<Hyp> candidates;
        for (const Hyp& h : beam) {
            if (h.finished) {
                candidates.push_back(h);
                continue;
            }
            all_done = false;
            const std::vector<double> probs = step(h.prefix);
            // Expanding only the top beam_width continuations is sufficient.
            std::vector<int> order(probs.size());
            for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return probs[static_cast<size_t>(a)] > probs[static_cast<size_t>(b)]; });
            const int take = std::min<int>(beam_width, static_cast<int>(order.size()));
            for (int i = 0; i < take; ++i) {
                Hyp next = h;
                const int tok = order[static_cast<size_t>(i)];
                next.prefix.push_back(tok);
                next.log_prob += std::log(std::max(probs[static_cast<size_t>(tok)], 1e-300));
                next.finished =
                    tok == kEos || static_cast<int>(next.prefix.size()) - 1 >= max_tokens;
                candidates.push_back(std::move(next));
            }
        }
        if (all_done) break;
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Hyp& a, const Hyp& b) { return a.normalized() > b.normalized(); });
        if (static_cast<int>(candidates.size()) > beam_width) {
            candidates.resize(static_cast<size_t>(beam_width));
        }
        beam = std::move(candidates);
    }
    const Hyp* best = &beam.front();
    for (const Hyp& h : beam) {
        if (h.normalized() > best->normalized()) best = &h;
    }
    return strip_frame(best->prefix);
}

namespace {

StepFn model_step(const ModelParams& params, int domain, const FusedCode& fused) {
    return [&params, domain, &fused](const std::vector<int>& prefix) {
        NoGradGuard no_grad;
        return decode_step(params, domain, fused, prefix).data();
    };
}

}  // namespace

std::vector<int> greedy_decode(const ModelParams& params, int domain, const FusedCode& fused) {
    return greedy_search(model_step(params, domain, fused), params.hp.max_len);
}

std::vector<int> beam_decode(const ModelParams& params, int domain, const FusedCode& fused,
                             int beam_width) {
    return beam_search(model_step(params, domain, fused), params.hp.max_len, beam_width);
}

// ---- transfer -----------------------------------------------------------------

std::vector<int> transfer_with_donor(const ModelParams& params,
                                     const std::vector<int>& input_tokens, int source_domain,
                                     const std::vector<int>& donor_tokens,
                                     DecodeMode decode, int beam_width) {
    if (source_domain != 1 && source_domain != 2) {
        throw std::invalid_argument("transfer: source domain must be 1 or 2");
    }
    const int target_domain = source_domain == 1 ? 2 : 1;
    NoGradGuard no_grad;
    std::vector<int> framed_input{kBos};
    framed_input.insert(framed_input.end(), input_tokens.begin(), input_tokens.end());
    framed_input.push_back(kEos);
    std::vector<int> framed_donor{kBos};
    framed_donor.insert(framed_donor.end(), donor_tokens.begin(), donor_tokens.end());
    framed_donor.push_back(kEos);

    ContentCode content = encode_content(params, source_domain, framed_input);
    StyleCode style = encode_style(params, target_domain, framed_donor);
    FusedCode fused = compose(content, style);
    return decode == DecodeMode::kGreedy ? greedy_decode(params, target_domain, fused)
                                         : beam_decode(params, target_domain, fused, beam_width);
}

std::vector<int> retrieval_pool(const std::vector<int>& input_tokens,
                                const std::vector<std::vector<int>>& target_corpus,
                                const Vocabulary& vocab, const EmbeddingTable& embeddings,
                                int pool_size) {
    std::vector<std::string> input_words;
    for (int id : input_tokens) input_words.push_back(vocab.token_of(id));
    const auto query = embeddings.sentence_embedding(input_words);

    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(target_corpus.size());
    for (size_t i = 0; i < target_corpus.size(); ++i) {
        std::vector<std::string> words;
        for (int id : target_corpus[i]) words.push_back(vocab.token_of(id));
        const double sim = cosine_similarity(query, embeddings.sentence_embedding(words));
        ranked.emplace_back(sim, static_cast<int>(i));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const int take = std::min<int>(pool_size, static_cast<int>(ranked.size()));
    std::vector<int> pool;
    pool.reserve(static_cast<size_t>(take));
    for (int i = 0; i < take; ++i) pool.push_back(ranked[static_cast<size_t>(i)].second);
    return pool;
}

std::vector<TransferVariant> transfer(const ModelParams& params,
                                      const std::vector<int>& input_tokens, int source_domain,
                                      const std::vector<std::vector<int>>& target_corpus,
                                      const SamplingConfig& config, const Vocabulary& vocab,
                                      const EmbeddingTable* embeddings) {
    config.validate();
    if (target_corpus.empty()) throw std::invalid_argument("transfer: target corpus is empty");
    if (!params.trained) {
        throw std::runtime_error("transfer: checkpoint metadata marks the model as untrained");
    }

    std::vector<int> donor_pool;
    if (config.scheme == SamplingScheme::kRetrieval) {
        if (embeddings == nullptr) {
            throw std::invalid_argument("transfer: retrieval sampling needs an embedding table");
        }
        donor_pool = retrieval_pool(input_tokens, target_corpus, vocab, *embeddings,
                                    config.pool_size);
    } else {
        donor_pool.resize(target_corpus.size());
        for (size_t i = 0; i < donor_pool.size(); ++i) donor_pool[i] = static_cast<int>(i);
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<size_t> pick(0, donor_pool.size() - 1);
    std::vector<TransferVariant> variants;
    variants.reserve(static_cast<size_t>(config.num_variants));
    for (int v = 0; v < config.num_variants; ++v) {
        TransferVariant out;
        out.donor_index = donor_pool[pick(rng)];
        out.tokens = transfer_with_donor(params, input_tokens, source_domain,
                                         target_corpus[static_cast<size_t>(out.donor_index)],
                                         config.decode, config.beam_width);
        variants.push_back(std::move(out));
    }
    return variants;
}

// ---- transfer file ------------------------------------------------------------------

void write_transfer_file(const std::string& path, const std::vector<TransferRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("transfer file: cannot write " + path);
    for (const auto& r : rows) {
        f << r.input << '\t' << r.variant << '\t' << r.donor << '\t' << r.output << '\n';
    }
}

std::vector<TransferRow> read_transfer_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("transfer file: cannot read " + path);
    std::vector<TransferRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cols;
        size_t start = 0;
        for (int c = 0; c < 3; ++c) {
            const size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                throw std::runtime_error("transfer file: line " + std::to_string(lineno) +
                                         " of " + path + " has fewer than 4 columns");
            }
            cols.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        TransferRow r;
        r.input = cols[0];
        r.variant = std::stoi(cols[1]);
        r.donor = std::stoi(cols[2]);
        r.output = line.substr(start);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace polystyle
