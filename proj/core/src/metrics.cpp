#include "polystyle/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace polystyle {

void ContentScoreConfig::validate() const {
    if (!(lambda > 0)) throw std::invalid_argument("content score: lambda must be positive");
    if (!(threshold > 0)) throw std::invalid_argument("content score: threshold must be positive");
    if (n < 1) throw std::invalid_argument("content score: n must be >= 1");
}

double style_magnitude(const NgramStats& stats, const std::string& u, int domain,
                       double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("style_magnitude: lambda must be positive");
    if (domain != 1 && domain != 2) throw std::invalid_argument("style_magnitude: domain must be 1 or 2");
    const int other = domain == 1 ? 2 : 1;
    return (static_cast<double>(stats.count(domain, u)) + lambda) /
           (static_cast<double>(stats.count(other, u)) + lambda);
}

std::set<std::string> detect_style_words(const NgramStats& stats,
                                         const ContentScoreConfig& config) {
    config.validate();
    std::set<std::string> words;
    auto consider = [&](const std::string& u) {
        const double s = std::max(style_magnitude(stats, u, 1, config.lambda),
                                  style_magnitude(stats, u, 2, config.lambda));
        if (s > config.threshold) words.insert(u);
    };
    for (const auto& [u, c] : stats.counts[0]) consider(u);
    for (const auto& [u, c] : stats.counts[1]) {
        if (!stats.counts[0].count(u)) consider(u);
    }
    return words;
}

double content_score(const std::vector<std::string>& sent_a,
                     const std::vector<std::string>& sent_b,
                     const std::set<std::string>& style_words,
                     const EmbeddingTable& embeddings) {
    auto residue_embedding = [&](const std::vector<std::string>& sent) {
        std::vector<std::string> kept;
        for (const auto& w : sent) {
            if (!style_words.count(w) && embeddings.contains(w)) kept.push_back(w);
        }
        return embeddings.sentence_embedding(kept);
    };
    const auto va = residue_embedding(sent_a);
    const auto vb = residue_embedding(sent_b);
    if (va.empty() || vb.empty()) return 0.0;
    return 100.0 * std::max(0.0, cosine_similarity(va, vb));
}

// ---- BLEU ---------------------------------------------------------------------

namespace {

std::map<std::string, long long> ngrams_of(const std::vector<std::string>& tokens, int n) {
    std::map<std::string, long long> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int j = 1; j < n; ++j) {
            key.push_back('\x1f');
            key += tokens[i + static_cast<size_t>(j)];
        }
        ++counts[key];
    }
    return counts;
}

struct SegmentCounts {
    std::vector<long long> correct;  // per n
    std::vector<long long> total;    // per n
    long long hyp_len = 0;
    long long ref_len = 0;  // closest reference length (ties -> shorter)
    int longest_hyp = 0;
};

SegmentCounts segment_counts(const std::vector<std::string>& hyp,
                             const std::vector<std::vector<std::string>>& refs, int max_n) {
    SegmentCounts sc;
    sc.correct.assign(static_cast<size_t>(max_n), 0);
    sc.total.assign(static_cast<size_t>(max_n), 0);
    sc.hyp_len = static_cast<long long>(hyp.size());
    sc.longest_hyp = static_cast<int>(hyp.size());
    long long best = static_cast<long long>(refs[0].size());
    for (const auto& r : refs) {
        const long long rl = static_cast<long long>(r.size());
        const long long d_new = std::llabs(rl - sc.hyp_len);
        const long long d_old = std::llabs(best - sc.hyp_len);
        if (d_new < d_old || (d_new == d_old && rl < best)) best = rl;
    }
    sc.ref_len = best;
    for (int n = 1; n <= max_n; ++n) {
        auto hyp_counts = ngrams_of(hyp, n);
        std::map<std::string, long long> ref_max;
        for (const auto& r : refs) {
            for (const auto& [k, c] : ngrams_of(r, n)) {
                auto& m = ref_max[k];
                m = std::max(m, c);
            }
        }
        for (const auto& [k, c] : hyp_counts) {
            sc.total[static_cast<size_t>(n - 1)] += c;
            auto it = ref_max.find(k);
            if (it != ref_max.end()) {
                sc.correct[static_cast<size_t>(n - 1)] += std::min(c, it->second);
            }
        }
    }
    return sc;
}

BleuResult score_from_counts(const std::vector<long long>& correct,
                             const std::vector<long long>& total, long long hyp_len,
                             long long ref_len, int longest_hyp, int max_n) {
    BleuResult r;
    r.precisions.assign(static_cast<size_t>(max_n), 0.0);
    if (hyp_len == 0) return r;  // score 0, precisions 0, bp 0
    for (int n = 1; n <= max_n; ++n) {
        const size_t i = static_cast<size_t>(n - 1);
        r.precisions[i] = total[i] > 0
                              ? 100.0 * static_cast<double>(correct[i]) / static_cast<double>(total[i])
                              : 0.0;
    }
    r.brevity_penalty = hyp_len >= ref_len
                            ? 1.0
                            : std::exp(1.0 - static_cast<double>(ref_len) /
                                                 static_cast<double>(hyp_len));
    // Orders longer than the longest hypothesis have no n-grams at all and
    // are excluded from the geometric mean.
    const int n_eff = std::min(max_n, longest_hyp);
    double log_sum = 0.0;
    for (int n = 1; n <= n_eff; ++n) {
        const size_t i = static_cast<size_t>(n - 1);
        if (correct[i] == 0) return r;  // exact zero, precisions still reported
        log_sum += std::log(r.precisions[i] / 100.0);
    }
    r.score = 100.0 * r.brevity_penalty * std::exp(log_sum / n_eff);
    return r;
}

}  // namespace

BleuResult bleu(const std::vector<std::string>& hypothesis,
                const std::vector<std::vector<std::string>>& references, int max_n) {
    if (max_n < 1) throw std::invalid_argument("bleu: max_n must be >= 1");
    if (references.empty()) throw std::invalid_argument("bleu: need at least one reference");
    if (hypothesis.empty()) {
        BleuResult r;
        r.precisions.assign(static_cast<size_t>(max_n), 0.0);
        return r;
    }
    SegmentCounts sc = segment_counts(hypothesis, references, max_n);
    return score_from_counts(sc.correct, sc.total, sc.hyp_len, sc.ref_len, sc.longest_hyp,
                             max_n);
}

BleuResult corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                       const std::vector<std::vector<std::vector<std::string>>>& references,
                       int max_n) {
    if (max_n < 1) throw std::invalid_argument("bleu: max_n must be >= 1");
    if (hypotheses.empty() || hypotheses.size() != references.size()) {
        throw std::invalid_argument("corpus_bleu: hypothesis/reference count mismatch");
    }
    std::vector<long long> correct(static_cast<size_t>(max_n), 0);
    std::vector<long long> total(static_cast<size_t>(max_n), 0);
    long long hyp_len = 0, ref_len = 0;
    int longest = 0;
    for (size_t s = 0; s < hypotheses.size(); ++s) {
        if (references[s].empty()) throw std::invalid_argument("corpus_bleu: empty reference set");
        if (hypotheses[s].empty()) continue;  // contributes nothing but keeps lengths honest
        SegmentCounts sc = segment_counts(hypotheses[s], references[s], max_n);
        for (int n = 0; n < max_n; ++n) {
            correct[static_cast<size_t>(n)] += sc.correct[static_cast<size_t>(n)];
            total[static_cast<size_t>(n)] += sc.total[static_cast<size_t>(n)];
        }
        hyp_len += sc.hyp_len;
        ref_len += sc.ref_len;
        longest = std::max(longest, sc.longest_hyp);
    }
    return score_from_counts(correct, total, hyp_len, ref_len, longest, max_n);
}

double mean_pairwise_self_bleu(const std::vector<std::vector<std::string>>& variants, int k) {
    if (variants.size() < 2) {
        throw std::invalid_argument("self-BLEU: need at least two variants");
    }
    double sum = 0.0;
    int pairs = 0;
    for (size_t i = 0; i < variants.size(); ++i) {
        for (size_t j = i + 1; j < variants.size(); ++j) {
            const double ab = variants[i].empty() ? 0.0 : bleu(variants[i], {variants[j]}, k).score;
            const double ba = variants[j].empty() ? 0.0 : bleu(variants[j], {variants[i]}, k).score;
            sum += 0.5 * (ab + ba);
            ++pairs;
        }
    }
    return sum / pairs;
}

double diversity_score(
    const std::vector<std::vector<std::vector<std::string>>>& variant_sets, int k) {
    if (variant_sets.empty()) throw std::invalid_argument("diversity: no variant sets");
    double sum = 0.0;
    long long pairs = 0;
    for (const auto& set : variant_sets) {
        if (set.size() != 5) {
            throw std::invalid_argument("diversity: expected exactly 5 variants, got " +
                                        std::to_string(set.size()));
        }
        for (size_t i = 0; i < set.size(); ++i) {
            for (size_t j = i + 1; j < set.size(); ++j) {
                const double ab = set[i].empty() ? 0.0 : bleu(set[i], {set[j]}, k).score;
                const double ba = set[j].empty() ? 0.0 : bleu(set[j], {set[i]}, k).score;
                sum += 0.5 * (ab + ba);
                ++pairs;
            }
        }
    }
    return 100.0 - sum / static_cast<double>(pairs);
}

// ---- text classifier --------------------------------------------------------------

std::vector<NamedParam> TextClassifier::params() {
    return {
        {"clf.emb", emb},          {"clf.conv1.w", conv1_w}, {"clf.conv1.b", conv1_b},
        {"clf.conv2.w", conv2_w},  {"clf.conv2.b", conv2_b}, {"clf.out.w", out_w},
        {"clf.out.b", out_b},
    };
}

namespace {

Tensor classifier_logits(const TextClassifier& c, const std::vector<int>& ids) {
    const int same = (c.kernel - 1) / 2;
    Tensor h = embed(c.emb, ids);
    h = tanh(conv1d(h, c.conv1_w, c.conv1_b, same, same));
    h = tanh(conv1d(h, c.conv2_w, c.conv2_b, same, same));
    return linear(mean_over_positions(h), c.out_w, c.out_b);
}

std::vector<int> classifier_ids(const TextClassifier& c, const std::vector<std::string>& tokens) {
    std::vector<int> ids;
    ids.reserve(tokens.size() + 2);
    ids.push_back(kBos);
    for (const auto& t : tokens) ids.push_back(c.vocab.id_of(t));
    ids.push_back(kEos);
    return ids;
}

}  // namespace

std::pair<double, double> TextClassifier::predict(const std::vector<std::string>& tokens) const {
    NoGradGuard no_grad;
    Tensor probs = softmax(classifier_logits(*this, classifier_ids(*this, tokens)));
    return {probs.data()[0], probs.data()[1]};
}

int TextClassifier::predict_label(const std::vector<std::string>& tokens) const {
    auto [p1, p2] = predict(tokens);
    return p2 > p1 ? 2 : 1;
}

TextClassifier train_style_classifier(
    const std::vector<std::vector<std::string>>& domain1,
    const std::vector<std::vector<std::string>>& domain2,
    const ClassifierTrainConfig& config) {
    if (domain1.empty() || domain2.empty()) {
        throw std::invalid_argument("train_style_classifier: both corpora must be nonempty");
    }
    std::vector<std::vector<std::string>> all(domain1);
    all.insert(all.end(), domain2.begin(), domain2.end());

    TextClassifier c;
    c.vocab = Vocabulary::build(all, config.min_count);
    c.d = config.d;
    c.seed = config.seed;
    std::mt19937_64 rng(config.seed);
    const int v = c.vocab.size(), d = c.d, k = c.kernel;
    c.emb = init_uniform({v, d}, d, rng);
    c.conv1_w = init_uniform({d, k, d}, k * d, rng);
    c.conv1_b = init_uniform({d}, k * d, rng);
    c.conv2_w = init_uniform({d, k, d}, k * d, rng);
    c.conv2_b = init_uniform({d}, k * d, rng);
    c.out_w = init_uniform({d, 2}, d, rng);
    c.out_b = init_uniform({2}, d, rng);

    struct Example {
        std::vector<int> ids;
        int label;  // 0 or 1
    };
    std::vector<Example> examples;
    for (const auto& s : domain1) examples.push_back({classifier_ids(c, s), 0});
    for (const auto& s : domain2) examples.push_back({classifier_ids(c, s), 1});
    std::shuffle(examples.begin(), examples.end(), rng);
    size_t n_val = static_cast<size_t>(config.val_fraction * static_cast<double>(examples.size()));
    n_val = std::min(std::max<size_t>(n_val, 1), examples.size() - 1);
    std::vector<Example> val(examples.end() - static_cast<long>(n_val), examples.end());
    examples.resize(examples.size() - n_val);

    auto params = c.params();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(examples.begin(), examples.end(), rng);
        for (const Example& ex : examples) {
            Tape tape;
            Tensor logp = log_softmax(classifier_logits(c, ex.ids));
            Tensor nll = scale(slice_vec(logp, ex.label, ex.label + 1), -1.0);
            tape.backward(nll);
            sgd_step(params, config.learning_rate);
        }
    }

    int hits = 0;
    {
        NoGradGuard no_grad;
        for (const Example& ex : val) {
            Tensor probs = softmax(classifier_logits(c, ex.ids));
            const int pred = probs.data()[1] > probs.data()[0] ? 1 : 0;
            if (pred == ex.label) ++hits;
        }
    }
    c.val_accuracy = static_cast<double>(hits) / static_cast<double>(val.size());
    return c;
}

TextClassifier train_style_classifier(const CorpusPair& corpus, uint64_t seed) {
    auto decode_all = [&](const std::vector<std::vector<int>>& dom) {
        std::vector<std::vector<std::string>> out;
        out.reserve(dom.size());
        for (const auto& seq : dom) out.push_back(corpus.vocab.decode(seq));
        return out;
    };
    ClassifierTrainConfig cfg;
    cfg.seed = seed;
    return train_style_classifier(decode_all(corpus.domain1), decode_all(corpus.domain2), cfg);
}

double style_score(const TextClassifier& classifier,
                   const std::vector<std::vector<std::string>>& outputs, int target_label) {
    if (target_label != 1 && target_label != 2) {
        throw std::invalid_argument("style_score: target label must be 1 or 2");
    }
    if (classifier.val_accuracy < kStyleGate) {
        std::ostringstream os;
        os << "style_score withheld: classifier validation accuracy "
           << 100.0 * classifier.val_accuracy << "% is below the required "
           << 100.0 * kStyleGate << "%";
        throw style_gate_error(os.str());
    }
    if (outputs.empty()) throw std::invalid_argument("style_score: no outputs");
    int hits = 0;
    for (const auto& out : outputs) {
        if (classifier.predict_label(out) == target_label) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(outputs.size());
}

// ---- classifier serialization --------------------------------------------------------

namespace {

constexpr char kClfMagic[4] = {'S', 'T', 'Y', 'C'};
constexpr uint32_t kClfVersion = 1;

void put_bytes(std::string& buf, const void* p, size_t n) {
    buf.append(static_cast<const char*>(p), n);
}

template <typename T>
void put(std::string& buf, T v) {
    put_bytes(buf, &v, sizeof(T));
}

void put_tensor(std::string& buf, const Tensor& t) {
    put<uint32_t>(buf, static_cast<uint32_t>(t.shape().size()));
    for (int d : t.shape()) put<int32_t>(buf, d);
    put<uint64_t>(buf, t.data().size());
    put_bytes(buf, t.data().data(), t.data().size() * sizeof(double));
}

}  // namespace

void TextClassifier::save(const std::string& path) const {
    std::string buf;
    put_bytes(buf, kClfMagic, 4);
    put<uint32_t>(buf, kClfVersion);
    put<int32_t>(buf, d);
    put<int32_t>(buf, kernel);
    put<double>(buf, val_accuracy);
    put<uint64_t>(buf, seed);
    put<uint32_t>(buf, static_cast<uint32_t>(vocab.size()));
    for (int i = 0; i < vocab.size(); ++i) {
        const std::string& tok = vocab.token_of(i);
        put<uint32_t>(buf, static_cast<uint32_t>(tok.size()));
        put_bytes(buf, tok.data(), tok.size());
    }
    for (const Tensor& t : {emb, conv1_w, conv1_b, conv2_w, conv2_b, out_w, out_b}) {
        put_tensor(buf, t);
    }
    put<uint64_t>(buf, fnv1a64(buf.data(), buf.size()));
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("classifier: cannot write " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("classifier: write failed for " + path);
}

TextClassifier TextClassifier::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("classifier: cannot read " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < 4 + sizeof(uint32_t) + sizeof(uint64_t)) {
        throw std::runtime_error("classifier: checksum mismatch (file truncated)");
    }
    if (std::memcmp(buf.data(), kClfMagic, 4) != 0) {
        throw std::runtime_error("classifier: bad magic bytes");
    }
    const size_t body = buf.size() - sizeof(uint64_t);
    uint64_t stored;
    std::memcpy(&stored, buf.data() + body, sizeof(uint64_t));
    if (stored != fnv1a64(buf.data(), body)) {
        throw std::runtime_error("classifier: checksum mismatch (file corrupt or truncated)");
    }

    size_t pos = 4;
    auto get_raw = [&](void* p, size_t n) {
        if (pos + n > body) throw std::runtime_error("classifier: truncated payload");
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    };
    auto get_u32 = [&] { uint32_t v; get_raw(&v, sizeof v); return v; };
    auto get_i32 = [&] { int32_t v; get_raw(&v, sizeof v); return v; };
    auto get_u64 = [&] { uint64_t v; get_raw(&v, sizeof v); return v; };
    auto get_f64 = [&] { double v; get_raw(&v, sizeof v); return v; };

    const uint32_t version = get_u32();
    if (version != kClfVersion) {
        throw std::runtime_error("classifier: unsupported version " + std::to_string(version));
    }
    TextClassifier c;
    c.d = get_i32();
    c.kernel = get_i32();
    c.val_accuracy = get_f64();
    c.seed = get_u64();
    const uint32_t vsize = get_u32();
    {
        std::vector<std::string> toks;
        for (uint32_t i = 0; i < vsize; ++i) {
            const uint32_t len = get_u32();
            std::string tok(len, '\0');
            get_raw(tok.data(), len);
            toks.push_back(std::move(tok));
        }
        c.vocab = Vocabulary::from_tokens(toks);
    }
    auto get_tensor = [&] {
        const uint32_t rank = get_u32();
        std::vector<int> shape(rank);
        for (uint32_t i = 0; i < rank; ++i) shape[i] = get_i32();
        const uint64_t n = get_u64();
        std::vector<double> data(n);
        get_raw(data.data(), n * sizeof(double));
        return Tensor::parameter(std::move(shape), std::move(data));
    };
    c.emb = get_tensor();
    c.conv1_w = get_tensor();
    c.conv1_b = get_tensor();
    c.conv2_w = get_tensor();
    c.conv2_b = get_tensor();
    c.out_w = get_tensor();
    c.out_b = get_tensor();
    return c;
}

// ---- evaluation pipeline ---------------------------------------------------------------

EvalReport evaluate_predictions(const EvalInputs& in, const TextClassifier* classifier,
                                const EmbeddingTable& embeddings, const NgramStats& stats,
                                const ContentScoreConfig& config) {
    if (in.inputs.size() != in.variants.size() || in.inputs.empty()) {
        throw std::invalid_argument("evaluate_predictions: inputs and variant sets must align");
    }
    EvalReport report;
    report.num_inputs = static_cast<int>(in.inputs.size());

    const auto style_words = detect_style_words(stats, config);

    std::vector<std::vector<std::string>> all_outputs;
    std::vector<std::vector<std::vector<std::string>>> refs;
    double content_sum = 0.0;
    int content_n = 0;
    bool all_have_five = true;
    for (size_t i = 0; i < in.inputs.size(); ++i) {
        if (in.variants[i].size() != 5) all_have_five = false;
        for (const auto& out : in.variants[i]) {
            all_outputs.push_back(out);
            refs.push_back({in.inputs[i]});
            content_sum += content_score(in.inputs[i], out, style_words, embeddings);
            ++content_n;
        }
    }
    if (content_n == 0) throw std::invalid_argument("evaluate_predictions: no outputs");
    report.num_outputs = content_n;
    report.content_score = content_sum / content_n;
    report.bleu = corpus_bleu(all_outputs, refs);

    if (classifier == nullptr) {
        report.style_note = "style_score withheld: no classifier provided";
    } else {
        try {
            report.style_score = style_score(*classifier, all_outputs, in.target_domain);
            report.style_available = true;
        } catch (const style_gate_error& e) {
            report.style_note = e.what();
        }
    }

    if (all_have_five) {
        for (int k : {2, 3, 4}) report.diversity[k] = diversity_score(in.variants, k);
    }
    return report;
}

void EvalReport::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("eval report: cannot write " + path);
    f.precision(6);
    f << std::fixed;
    f << "num_inputs = " << num_inputs << "\n";
    f << "num_outputs = " << num_outputs << "\n";
    if (style_available) {
        f << "style_score = " << style_score << "\n";
    } else {
        f << "style_score = withheld\n";
        f << "style_note = " << style_note << "\n";
    }
    f << "content_score = " << content_score << "\n";
    for (const auto& [k, v] : diversity) {
        f << "diversity_" << k << " = " << v << "\n";
    }
    f << "bleu = " << bleu.score << "\n";
    for (size_t i = 0; i < bleu.precisions.size(); ++i) {
        f << "bleu_p" << (i + 1) << " = " << bleu.precisions[i] << "\n";
    }
    f << "bleu_brevity_penalty = " << bleu.brevity_penalty << "\n";
}

}  // namespace polystyle
