#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polystyle::cli {

struct BuildVocabOptions {
    std::string domain1;
    std::string domain2;
    int min_count = 1;
    std::string out;
};
int cmd_build_vocab(const BuildVocabOptions& opt);

struct TrainOptions {
    std::string config_file;                 // optional
    std::vector<std::string> overrides;     // key=value
    std::vector<std::string> disable_loss;  // rec|back|mse|cls|adv
    std::string domain1;
    std::string domain2;
    std::string vocab;
    std::string out_dir = "runs";
};
int cmd_train(const TrainOptions& opt);

struct TransferOptions {
    std::string checkpoint;
    std::string vocab;
    std::string input;
    std::string target_corpus;
    int source_domain = 1;
    int variants = 1;
    std::string scheme = "uniform";
    int pool_size = 100;
    uint64_t seed = 0;
    std::string decode = "greedy";
    int beam_width = 1;
    std::string embeddings;  // required for retrieval
    std::string out;
};
int cmd_transfer(const TransferOptions& opt);

struct EvalOptions {
    std::string predictions;
    std::string domain1;
    std::string domain2;
    int target_domain = 2;
    std::string embeddings;   // trained in-line when empty
    std::string classifier;   // trained in-line when empty
    uint64_t seed = 1;
    double lambda = 1.0;
    double threshold = 5.0;
    std::string out;
};
int cmd_eval(const EvalOptions& opt);

struct TrainEmbeddingsOptions {
    std::string domain1;
    std::string domain2;
    int dim = 64;
    int epochs = 5;
    uint64_t seed = 1;
    std::string out;
};
int cmd_train_embeddings(const TrainEmbeddingsOptions& opt);

struct TrainClassifierOptions {
    std::string domain1;
    std::string domain2;
    int epochs = 12;
    uint64_t seed = 1;
    std::string out;
};
int cmd_train_classifier(const TrainClassifierOptions& opt);

}  // namespace polystyle::cli
