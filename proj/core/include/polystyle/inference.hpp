#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polystyle/corpus.hpp"
#include "polystyle/embeddings.hpp"
#include "polystyle/model.hpp"

namespace polystyle {

enum class SamplingScheme { kUniform, kRetrieval };
enum class DecodeMode { kGreedy, kBeam };

struct SamplingConfig {
    SamplingScheme scheme = SamplingScheme::kUniform;
    int pool_size = 100;  // retrieval only
    int num_variants = 1;
    uint64_t seed = 0;
    DecodeMode decode = DecodeMode::kGreedy;
    int beam_width = 1;

    void validate() const;
};

SamplingScheme parse_sampling_scheme(const std::string& name);
std::string to_string(SamplingScheme scheme);

// Generic autoregressive search over a step function prefix -> probabilities.
// Both stop at EOS or when max_tokens raw tokens were produced; the returned
// sequence excludes BOS and EOS.
using StepFn = std::function<std::vector<double>(const std::vector<int>& prefix)>;
std::vector<int> greedy_search(const StepFn& step, int max_tokens);
// Length-normalized beam search; beam_width == 1 matches greedy_search.
std::vector<int> beam_search(const StepFn& step, int max_tokens, int beam_width);

std::vector<int> greedy_decode(const ModelParams& params, int domain, const FusedCode& fused);
std::vector<int> beam_decode(const ModelParams& params, int domain, const FusedCode& fused,
                             int beam_width);

// One transfer with a chosen donor: decode from
// compose(encode_content(input), encode_style(donor)) in the target domain.
std::vector<int> transfer_with_donor(const ModelParams& params,
                                     const std::vector<int>& input_tokens, int source_domain,
                                     const std::vector<int>& donor_tokens,
                                     DecodeMode decode = DecodeMode::kGreedy,
                                     int beam_width = 1);

// Ranks target-corpus candidates by cosine similarity of average-word-embedding
// sentence vectors against the input; ties broken by corpus order.
std::vector<int> retrieval_pool(const std::vector<int>& input_tokens,
                                const std::vector<std::vector<int>>& target_corpus,
                                const Vocabulary& vocab, const EmbeddingTable& embeddings,
                                int pool_size);

struct TransferVariant {
    int donor_index = -1;
    std::vector<int> tokens;  // raw ids, no specials
};

// One-to-many transfer: num_variants donor draws (uniform over the corpus, or
// uniform over the retrieval pool), each decoded deterministically.
std::vector<TransferVariant> transfer(const ModelParams& params,
                                      const std::vector<int>& input_tokens, int source_domain,
                                      const std::vector<std::vector<int>>& target_corpus,
                                      const SamplingConfig& config, const Vocabulary& vocab,
                                      const EmbeddingTable* embeddings = nullptr);

// Transfer output file: tab-separated input sentence, variant index, donor
// sentence index, output sentence; one line per variant.
struct TransferRow {
    std::string input;
    int variant = 0;
    int donor = -1;
    std::string output;
};

void write_transfer_file(const std::string& path, const std::vector<TransferRow>& rows);
std::vector<TransferRow> read_transfer_file(const std::string& path);

}  // namespace polystyle
