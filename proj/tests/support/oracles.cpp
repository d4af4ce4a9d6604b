#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polystyle::testsupport {

namespace {

bool same_ngram(const std::vector<std::string>& a, size_t ai, const std::vector<std::string>& b,
                size_t bi, int n) {
    for (int j = 0; j < n; ++j) {
        if (a[ai + static_cast<size_t>(j)] != b[bi + static_cast<size_t>(j)]) return false;
    }
    return true;
}

long long occurrences(const std::vector<std::string>& where, const std::vector<std::string>& of,
                      size_t at, int n) {
    if (static_cast<int>(where.size()) < n) return 0;
    long long c = 0;
    for (size_t i = 0; i + static_cast<size_t>(n) <= where.size(); ++i) {
        if (same_ngram(where, i, of, at, n)) ++c;
    }
    return c;
}

}  // namespace

BleuOracleResult bleu_oracle(const std::vector<std::string>& hyp,
                             const std::vector<std::vector<std::string>>& refs, int max_n) {
    BleuOracleResult r;
    r.precisions.assign(static_cast<size_t>(max_n), 0.0);
    if (hyp.empty()) return r;

    const long long h = static_cast<long long>(hyp.size());
    long long ref_len = static_cast<long long>(refs[0].size());
    for (const auto& ref : refs) {
        const long long rl = static_cast<long long>(ref.size());
        if (std::llabs(rl - h) < std::llabs(ref_len - h) ||
            (std::llabs(rl - h) == std::llabs(ref_len - h) && rl < ref_len)) {
            ref_len = rl;
        }
    }
    r.brevity_penalty =
        h >= ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(h));

    std::vector<long long> correct(static_cast<size_t>(max_n), 0);
    std::vector<long long> total(static_cast<size_t>(max_n), 0);
    for (int n = 1; n <= max_n; ++n) {
        if (static_cast<int>(hyp.size()) < n) continue;
        for (size_t i = 0; i + static_cast<size_t>(n) <= hyp.size(); ++i) {
            // First occurrence position marks the distinct n-gram.
            bool first = true;
            for (size_t j = 0; j < i; ++j) {
                if (same_ngram(hyp, j, hyp, i, n)) {
                    first = false;
                    break;
                }
            }
            total[static_cast<size_t>(n - 1)] +=
                1;  // every position counts toward the denominator
            if (!first) continue;
            const long long in_hyp = occurrences(hyp, hyp, i, n);
            long long best_ref = 0;
            for (const auto& ref : refs) best_ref = std::max(best_ref, occurrences(ref, hyp, i, n));
            correct[static_cast<size_t>(n - 1)] += std::min(in_hyp, best_ref);
        }
    }

    for (int n = 1; n <= max_n; ++n) {
        const size_t i = static_cast<size_t>(n - 1);
        if (total[i] > 0) {
            r.precisions[i] = 100.0 * static_cast<double>(correct[i]) / static_cast<double>(total[i]);
        }
    }
    const int n_eff = std::min<int>(max_n, static_cast<int>(hyp.size()));
    double log_sum = 0.0;
    for (int n = 1; n <= n_eff; ++n) {
        if (correct[static_cast<size_t>(n - 1)] == 0) return r;  // exact zero score
        log_sum += std::log(r.precisions[static_cast<size_t>(n - 1)] / 100.0);
    }
    r.score = 100.0 * r.brevity_penalty * std::exp(log_sum / n_eff);
    return r;
}

double pairwise_self_bleu_oracle(const std::vector<std::vector<std::string>>& variants, int k) {
    double sum = 0.0;
    int pairs = 0;
    for (size_t i = 0; i < variants.size(); ++i) {
        for (size_t j = i + 1; j < variants.size(); ++j) {
            sum += 0.5 * (bleu_oracle(variants[i], {variants[j]}, k).score +
                          bleu_oracle(variants[j], {variants[i]}, k).score);
            ++pairs;
        }
    }
    return sum / pairs;
}

double diversity_oracle(const std::vector<std::vector<std::vector<std::string>>>& sets, int k) {
    double sum = 0.0;
    long long pairs = 0;
    for (const auto& set : sets) {
        for (size_t i = 0; i < set.size(); ++i) {
            for (size_t j = i + 1; j < set.size(); ++j) {
                sum += 0.5 * (bleu_oracle(set[i], {set[j]}, k).score +
                              bleu_oracle(set[j], {set[i]}, k).score);
                ++pairs;
            }
        }
    }
    return 100.0 - sum / static_cast<double>(pairs);
}

double style_magnitude_oracle(const std::vector<std::vector<std::string>>& corpus1,
                              const std::vector<std::vector<std::string>>& corpus2,
                              const std::string& word, int domain, double lambda) {
    auto count_in = [&word](const std::vector<std::vector<std::string>>& corpus) {
        long long c = 0;
        for (const auto& sent : corpus) {
            for (const auto& tok : sent) {
                if (tok == word) ++c;
            }
        }
        return c;
    };
    const double d1 = static_cast<double>(count_in(corpus1));
    const double d2 = static_cast<double>(count_in(corpus2));
    return domain == 1 ? (d1 + lambda) / (d2 + lambda) : (d2 + lambda) / (d1 + lambda);
}

std::map<std::string, long long> ngram_counts_oracle(
    const std::vector<std::vector<std::string>>& corpus, int n) {
    std::map<std::string, long long> out;
    for (const auto& sent : corpus) {
        if (static_cast<int>(sent.size()) < n) continue;
        for (size_t i = 0; i + static_cast<size_t>(n) <= sent.size(); ++i) {
            std::string key;
            for (int j = 0; j < n; ++j) {
                if (j) key.push_back(' ');
                key += sent[i + static_cast<size_t>(j)];
            }
            ++out[key];
        }
    }
    return out;
}

std::vector<int> cosine_rank_oracle(const std::vector<double>& query,
                                    const std::vector<std::vector<double>>& candidates) {
    auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.empty() || b.empty()) return -1.0;
        double dot = 0, na = 0, nb = 0;
        for (size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        if (na == 0 || nb == 0) return -1.0;
        return dot / (std::sqrt(na) * std::sqrt(nb));
    };
    std::vector<int> order(candidates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ca = cosine(query, candidates[static_cast<size_t>(a)]);
        const double cb = cosine(query, candidates[static_cast<size_t>(b)]);
        if (ca != cb) return ca > cb;
        return a < b;
    });
    return order;
}

double population_std_oracle(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("oracle: empty values");
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return std::sqrt(var);
}

}  // namespace polystyle::testsupport
