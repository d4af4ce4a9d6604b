#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "polystyle/corpus.hpp"
#include "polystyle/embeddings.hpp"
#include "polystyle/tensor.hpp"

namespace polystyle {

struct ContentScoreConfig {
    double lambda = 1.0;
    double threshold = 5.0;
    int n = 1;
    void validate() const;
};

// s_i(u) = (D_i(u) + lambda) / (D_j(u) + lambda); missing counts are 0.
double style_magnitude(const NgramStats& stats, const std::string& u, int domain,
                       double lambda);

// u is a style word when max_k s_k(u) exceeds the threshold.
std::set<std::string> detect_style_words(const NgramStats& stats,
                                         const ContentScoreConfig& config);

// 100 * max(0, cosine) of average embeddings after removing style words and
// words without an embedding; 0 when either residue is empty.
double content_score(const std::vector<std::string>& sent_a,
                     const std::vector<std::string>& sent_b,
                     const std::set<std::string>& style_words,
                     const EmbeddingTable& embeddings);

struct BleuResult {
    double score = 0.0;               // 0..100
    std::vector<double> precisions;   // percent, one per n up to max_n
    double brevity_penalty = 0.0;
};

// Modified clipped n-gram precision with brevity penalty, no smoothing: any
// zero precision within the effective order zeroes the score while per-n
// precisions are still reported. Orders above the hypothesis length are
// excluded from the geometric mean (so bleu(x, {x}) == 100 for any nonempty x).
BleuResult bleu(const std::vector<std::string>& hypothesis,
                const std::vector<std::vector<std::string>>& references, int max_n = 4);

// Same reporting over aggregated corpus counts.
BleuResult corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                       const std::vector<std::vector<std::vector<std::string>>>& references,
                       int max_n = 4);

// Mean over unordered pairs of the two-direction average of pairwise BLEU-K.
double mean_pairwise_self_bleu(const std::vector<std::vector<std::string>>& variants, int k);

// 100 - mean self-BLEU-K over the 10 pairs of each 5-variant set.
double diversity_score(
    const std::vector<std::vector<std::vector<std::string>>>& variant_sets, int k);

// ---- evaluation style classifier -----------------------------------------------

// Raised when the classifier's validation accuracy is below the reporting gate.
class style_gate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kStyleGate = 0.90;

// Small conv text classifier standing in for the style judge; style scores
// are only reported when its held-out accuracy clears kStyleGate.
struct TextClassifier {
    Vocabulary vocab;
    int d = 32;
    int kernel = 3;
    Tensor emb;        // [V, d]
    Tensor conv1_w, conv1_b;
    Tensor conv2_w, conv2_b;
    Tensor out_w, out_b;  // [d,2], [2]
    double val_accuracy = 0.0;
    uint64_t seed = 0;

    std::vector<NamedParam> params();
    // Probability of each domain label {1,2} for a tokenized sentence.
    std::pair<double, double> predict(const std::vector<std::string>& tokens) const;
    int predict_label(const std::vector<std::string>& tokens) const;

    void save(const std::string& path) const;  // magic "STYC", checksummed
    static TextClassifier load(const std::string& path);
};

struct ClassifierTrainConfig {
    int d = 32;
    int epochs = 12;
    double learning_rate = 0.1;
    double val_fraction = 0.1;
    int min_count = 1;
    uint64_t seed = 1;
};

TextClassifier train_style_classifier(
    const std::vector<std::vector<std::string>>& domain1,
    const std::vector<std::vector<std::string>>& domain2,
    const ClassifierTrainConfig& config);
TextClassifier train_style_classifier(const CorpusPair& corpus, uint64_t seed);

// 100 * fraction of outputs assigned to the target style. Throws
// style_gate_error when the classifier is untrained or below the gate.
double style_score(const TextClassifier& classifier,
                   const std::vector<std::vector<std::string>>& outputs, int target_label);

// ---- whole-report evaluation ------------------------------------------------------

struct EvalInputs {
    std::vector<std::vector<std::string>> inputs;  // one per source sentence
    // variants[i][v] is the v-th transfer output for inputs[i]
    std::vector<std::vector<std::vector<std::string>>> variants;
    int target_domain = 2;
};

struct EvalReport {
    bool style_available = false;
    double style_score = 0.0;
    std::string style_note;
    double content_score = 0.0;
    std::map<int, double> diversity;  // K -> diversity-K, present when 5 variants/input
    BleuResult bleu;                  // corpus BLEU of outputs against their inputs
    int num_inputs = 0;
    int num_outputs = 0;

    void save(const std::string& path) const;  // key = value lines
};

EvalReport evaluate_predictions(const EvalInputs& in, const TextClassifier* classifier,
                                const EmbeddingTable& embeddings, const NgramStats& stats,
                                const ContentScoreConfig& config = {});

}  // namespace polystyle
