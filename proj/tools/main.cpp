#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"polystyle: one-to-many text style transfer via latent decomposition"};
    app.require_subcommand(1);

    polystyle::cli::BuildVocabOptions vocab_opt;
    auto* build_vocab = app.add_subcommand("build-vocab", "Build a shared vocabulary file");
    build_vocab->add_option("--domain1", vocab_opt.domain1, "Style-1 corpus")->required();
    build_vocab->add_option("--domain2", vocab_opt.domain2, "Style-2 corpus")->required();
    build_vocab->add_option("--min-count", vocab_opt.min_count, "Minimum token frequency");
    build_vocab->add_option("--out", vocab_opt.out, "Output vocabulary file")->required();

    polystyle::cli::TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "Train a style transfer model");
    train->add_option("--config", train_opt.config_file, "key = value config file");
    train->add_option("--set", train_opt.overrides, "Override config keys (key=value)");
    train->add_option("--disable-loss", train_opt.disable_loss,
                      "Disable a loss term (rec|back|mse|cls|adv)");
    train->add_option("--domain1", train_opt.domain1, "Style-1 corpus");
    train->add_option("--domain2", train_opt.domain2, "Style-2 corpus");
    train->add_option("--vocab", train_opt.vocab, "Vocabulary file");
    train->add_option("--out-dir", train_opt.out_dir, "Directory for run directories");

    polystyle::cli::TransferOptions transfer_opt;
    auto* transfer = app.add_subcommand("transfer", "Generate style transfer variants");
    transfer->add_option("--checkpoint", transfer_opt.checkpoint, "Model checkpoint")->required();
    transfer->add_option("--vocab", transfer_opt.vocab, "Vocabulary file")->required();
    transfer->add_option("--input", transfer_opt.input, "Input sentences (source style)")
        ->required();
    transfer->add_option("--target-corpus", transfer_opt.target_corpus,
                         "Target-style corpus to sample style codes from")
        ->required();
    transfer->add_option("--source-domain", transfer_opt.source_domain, "1 or 2");
    transfer->add_option("--variants", transfer_opt.variants, "Outputs per input");
    transfer->add_option("--scheme", transfer_opt.scheme, "uniform|retrieval");
    transfer->add_option("--pool-size", transfer_opt.pool_size, "Retrieval pool size");
    transfer->add_option("--seed", transfer_opt.seed, "Sampling seed");
    transfer->add_option("--decode", transfer_opt.decode, "greedy|beam");
    transfer->add_option("--beam-width", transfer_opt.beam_width, "Beam width");
    transfer->add_option("--embeddings", transfer_opt.embeddings,
                         "Embedding table (retrieval scheme)");
    transfer->add_option("--out", transfer_opt.out, "Output variant file")->required();

    polystyle::cli::EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "Score a transfer output file");
    eval->add_option("--predictions", eval_opt.predictions, "Transfer output file")->required();
    eval->add_option("--domain1", eval_opt.domain1, "Style-1 corpus")->required();
    eval->add_option("--domain2", eval_opt.domain2, "Style-2 corpus")->required();
    eval->add_option("--target-domain", eval_opt.target_domain, "Target style label (1 or 2)");
    eval->add_option("--embeddings", eval_opt.embeddings,
                     "Embedding table (trained in-line when omitted)");
    eval->add_option("--classifier", eval_opt.classifier,
                     "Classifier checkpoint (trained in-line when omitted)");
    eval->add_option("--seed", eval_opt.seed, "Seed for in-line training");
    eval->add_option("--lambda", eval_opt.lambda, "Style magnitude smoothing");
    eval->add_option("--threshold", eval_opt.threshold, "Style word threshold");
    eval->add_option("--out", eval_opt.out, "Report file");

    polystyle::cli::TrainEmbeddingsOptions emb_opt;
    auto* train_emb = app.add_subcommand("train-embeddings", "Train word embeddings");
    train_emb->add_option("--domain1", emb_opt.domain1, "Style-1 corpus")->required();
    train_emb->add_option("--domain2", emb_opt.domain2, "Style-2 corpus")->required();
    train_emb->add_option("--dim", emb_opt.dim, "Embedding dimension");
    train_emb->add_option("--epochs", emb_opt.epochs, "Training epochs");
    train_emb->add_option("--seed", emb_opt.seed, "Seed");
    train_emb->add_option("--out", emb_opt.out, "Output table")->required();

    polystyle::cli::TrainClassifierOptions clf_opt;
    auto* train_clf = app.add_subcommand("train-classifier", "Train the style judge");
    train_clf->add_option("--domain1", clf_opt.domain1, "Style-1 corpus")->required();
    train_clf->add_option("--domain2", clf_opt.domain2, "Style-2 corpus")->required();
    train_clf->add_option("--epochs", clf_opt.epochs, "Training epochs");
    train_clf->add_option("--seed", clf_opt.seed, "Seed");
    train_clf->add_option("--out", clf_opt.out, "Output checkpoint")->required();

    CLI11_PARSE(app, argc, argv);

    if (build_vocab->parsed()) return polystyle::cli::cmd_build_vocab(vocab_opt);
    if (train->parsed()) return polystyle::cli::cmd_train(train_opt);
    if (transfer->parsed()) return polystyle::cli::cmd_transfer(transfer_opt);
    if (eval->parsed()) return polystyle::cli::cmd_eval(eval_opt);
    if (train_emb->parsed()) return polystyle::cli::cmd_train_embeddings(emb_opt);
    if (train_clf->parsed()) return polystyle::cli::cmd_train_classifier(clf_opt);
    return 1;
}
