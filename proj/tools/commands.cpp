#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "polystyle/inference.hpp"
#include "polystyle/metrics.hpp"
#include "polystyle/training.hpp"
#include "polystyle/validation.hpp"
#include "run_config.hpp"

namespace polystyle::cli {

namespace fs = std::filesystem;

namespace {

int fail(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return 1;
}

std::vector<std::vector<std::string>> load_sentences(const std::string& path) {
    return read_sentences(path);  // throws with the path in the message
}

}  // namespace

int cmd_build_vocab(const BuildVocabOptions& opt) {
    try {
        auto s1 = load_sentences(opt.domain1);
        auto s2 = load_sentences(opt.domain2);
        std::vector<std::vector<std::string>> all(s1);
        all.insert(all.end(), s2.begin(), s2.end());
        Vocabulary vocab = Vocabulary::build(all, opt.min_count);
        vocab.save(opt.out);
        long long tokens = 0;
        for (const auto& s : all) tokens += static_cast<long long>(s.size());
        std::cout << "vocabulary: " << vocab.size() << " entries (4 specials), built from "
                  << all.size() << " sentences / " << tokens << " tokens\n";
        std::cout << "wrote " << opt.out << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_train(const TrainOptions& opt) {
    try {
        RunConfig cfg = RunConfig::train_defaults();
        if (!opt.config_file.empty()) cfg.load_file(opt.config_file);
        if (!opt.domain1.empty()) cfg.set("domain1", opt.domain1);
        if (!opt.domain2.empty()) cfg.set("domain2", opt.domain2);
        if (!opt.vocab.empty()) cfg.set("vocab", opt.vocab);
        if (!opt.out_dir.empty()) cfg.set("out_dir", opt.out_dir);
        cfg.apply_overrides(opt.overrides);
        for (const auto& name : opt.disable_loss) {
            if (name != "rec" && name != "back" && name != "mse" && name != "cls" &&
                name != "adv") {
                return fail("unknown loss toggle '" + name + "' (use rec|back|mse|cls|adv)");
            }
            cfg.set("loss_" + name, "false");
        }

        // Pre-flight validation: every failure happens before any training step.
        for (const char* key : {"domain1", "domain2", "vocab"}) {
            if (!cfg.has(key)) return fail(std::string("config: missing key '") + key + "'");
            if (!fs::exists(cfg.get(key))) {
                return fail("config: " + std::string(key) + " file not found: " + cfg.get(key));
            }
        }
        TrainConfig train_cfg;
        train_cfg.epochs = cfg.get_int("epochs");
        train_cfg.batch_size = cfg.get_int("batch_size");
        train_cfg.seed = cfg.get_u64("seed");
        train_cfg.sgd.learning_rate = cfg.get_double("learning_rate");
        train_cfg.sgd.decay_factor = cfg.get_double("lr_decay");
        train_cfg.sgd.min_learning_rate = cfg.get_double("lr_min");
        train_cfg.d_steps_per_g_step = cfg.get_int("d_steps_per_g_step");
        train_cfg.convergence_window = cfg.get_int("convergence_window");
        train_cfg.val_fraction = cfg.get_double("val_fraction");
        train_cfg.losses.reconstruction = cfg.get_bool("loss_rec");
        train_cfg.losses.back_translation = cfg.get_bool("loss_back");
        train_cfg.losses.mse_bridge = cfg.get_bool("loss_mse");
        train_cfg.losses.style_classification = cfg.get_bool("loss_cls");
        train_cfg.losses.adversarial = cfg.get_bool("loss_adv");
        train_cfg.validate();

        Hyperparams hp;
        hp.d = cfg.get_int("d");
        hp.max_len = cfg.get_int("max_len");

        Vocabulary vocab = Vocabulary::load(cfg.get("vocab"));
        hp.vocab_size = vocab.size();
        hp.validate();
        CorpusPair corpus =
            load_corpus_pair(cfg.get("domain1"), cfg.get("domain2"), vocab, hp.max_len);
        if (corpus.dropped_too_long > 0) {
            std::cerr << "note: dropped " << corpus.dropped_too_long
                      << " sentences longer than max_len=" << hp.max_len << "\n";
        }

        const fs::path run_dir = fs::path(cfg.get("out_dir")) / ("run-" + cfg.hash_hex());
        fs::create_directories(run_dir);
        cfg.save((run_dir / "config.txt").string());
        std::cout << "run directory: " << run_dir.string() << "\n";

        ModelParams params = ModelParams::init(hp, train_cfg.seed);
        params.vocab_hash = vocab.content_hash();

        TrainHooks hooks;
        const std::string scorer_mode = cfg.get_or("validation_scores", "auto");
        std::shared_ptr<ValidationAssets> assets;
        if (scorer_mode == "auto") {
            std::cout << "training validation scorer assets (classifier + embeddings)...\n";
            assets = std::make_shared<ValidationAssets>(
                build_validation_assets(corpus, train_cfg.seed));
            if (assets->classifier.val_accuracy < kStyleGate) {
                std::cerr << "note: validation classifier accuracy "
                          << 100.0 * assets->classifier.val_accuracy
                          << "% is below the reporting gate; training continues without "
                             "score-based lr decay\n";
            } else {
                hooks.scorer = make_validation_scorer(assets, train_cfg.seed);
            }
        } else if (scorer_mode != "none") {
            return fail("config: validation_scores must be auto or none");
        }

        std::ofstream log_file(run_dir / "train.log");
        if (!log_file) return fail("cannot write " + (run_dir / "train.log").string());
        hooks.on_epoch = [&](const EpochLog& log) {
            log_file << format_epoch_log(log) << "\n";
            log_file.flush();
            std::cout << "epoch " << log.epoch << " total_g=" << log.losses.total_g
                      << " total_d=" << log.losses.total_d;
            if (log.val_style >= 0) {
                std::cout << " val_style=" << log.val_style
                          << " val_content=" << log.val_content;
            }
            std::cout << " lr=" << log.learning_rate << "\n";
        };
        hooks.checkpoint_every = cfg.get_int("checkpoint_every");
        hooks.on_checkpoint = [&](ModelParams& p, int epoch) {
            const fs::path path =
                epoch + 1 == train_cfg.epochs
                    ? run_dir / "model.ckpt"
                    : run_dir / ("checkpoint-" + std::to_string(epoch) + ".ckpt");
            save_checkpoint(p, path.string());
        };

        train(train_cfg, corpus, params, hooks);
        std::cout << "final checkpoint: " << (run_dir / "model.ckpt").string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_transfer(const TransferOptions& opt) {
    try {
        ModelParams params = load_checkpoint(opt.checkpoint);
        Vocabulary vocab = Vocabulary::load(opt.vocab);
        if (params.vocab_hash != vocab.content_hash()) {
            std::ostringstream os;
            os << "vocabulary mismatch: checkpoint was trained with vocab hash " << std::hex
               << params.vocab_hash << ", " << opt.vocab << " hashes to "
               << vocab.content_hash();
            return fail(os.str());
        }

        SamplingConfig cfg;
        cfg.scheme = parse_sampling_scheme(opt.scheme);
        cfg.pool_size = opt.pool_size;
        cfg.num_variants = opt.variants;
        cfg.seed = opt.seed;
        cfg.decode = opt.decode == "beam" ? DecodeMode::kBeam : DecodeMode::kGreedy;
        cfg.beam_width = opt.beam_width;
        cfg.validate();
        if (opt.decode != "greedy" && opt.decode != "beam") {
            return fail("decode must be greedy or beam, got '" + opt.decode + "'");
        }

        EmbeddingTable embeddings;
        const EmbeddingTable* emb_ptr = nullptr;
        if (cfg.scheme == SamplingScheme::kRetrieval) {
            if (opt.embeddings.empty()) {
                return fail("retrieval sampling needs --embeddings");
            }
            embeddings = EmbeddingTable::load(opt.embeddings);
            emb_ptr = &embeddings;
        }

        auto inputs = load_sentences(opt.input);
        auto target_sents = load_sentences(opt.target_corpus);
        CorpusPair target = opt.source_domain == 1
                                ? make_corpus_pair({}, target_sents, vocab, params.hp.max_len)
                                : make_corpus_pair(target_sents, {}, vocab, params.hp.max_len);
        const auto& donors = opt.source_domain == 1 ? target.domain2 : target.domain1;
        if (donors.empty()) return fail("target corpus is empty after length filtering");

        std::vector<TransferRow> rows;
        int skipped = 0;
        uint64_t input_seed = cfg.seed;
        for (const auto& sent : inputs) {
            if (static_cast<int>(sent.size()) > params.hp.max_len) {
                ++skipped;
                continue;
            }
            std::vector<int> ids;
            for (const auto& w : sent) ids.push_back(vocab.id_of(w));
            SamplingConfig per_input = cfg;
            per_input.seed = input_seed++;
            auto variants = transfer(params, ids, opt.source_domain, donors, per_input, vocab,
                                     emb_ptr);
            for (size_t v = 0; v < variants.size(); ++v) {
                TransferRow row;
                row.input = join_tokens(sent);
                row.variant = static_cast<int>(v);
                row.donor = variants[v].donor_index;
                row.output = join_tokens(vocab.decode(variants[v].tokens));
                rows.push_back(std::move(row));
            }
        }
        if (skipped > 0) {
            std::cerr << "note: skipped " << skipped << " inputs longer than max_len\n";
        }
        write_transfer_file(opt.out, rows);
        std::cout << "wrote " << rows.size() << " variants to " << opt.out << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_eval(const EvalOptions& opt) {
    try {
        auto rows = read_transfer_file(opt.predictions);
        if (rows.empty()) return fail("predictions file has no rows: " + opt.predictions);
        auto sents1 = load_sentences(opt.domain1);
        auto sents2 = load_sentences(opt.domain2);

        EmbeddingTable embeddings;
        if (!opt.embeddings.empty()) {
            embeddings = EmbeddingTable::load(opt.embeddings);
        } else {
            std::cout << "training embeddings in-line (no --embeddings given)...\n";
            std::vector<std::vector<std::string>> all(sents1);
            all.insert(all.end(), sents2.begin(), sents2.end());
            embeddings = train_embeddings(all, 64, 5, opt.seed);
        }

        TextClassifier classifier;
        if (!opt.classifier.empty()) {
            classifier = TextClassifier::load(opt.classifier);
        } else {
            std::cout << "training style classifier in-line (no --classifier given)...\n";
            ClassifierTrainConfig ccfg;
            ccfg.seed = opt.seed;
            classifier = train_style_classifier(sents1, sents2, ccfg);
            std::cout << "classifier validation accuracy: " << 100.0 * classifier.val_accuracy
                      << "%\n";
        }

        // Group variants by input in first-appearance order.
        EvalInputs in;
        in.target_domain = opt.target_domain;
        std::map<std::string, size_t> index_of;
        for (const auto& row : rows) {
            auto [it, fresh] = index_of.try_emplace(row.input, in.inputs.size());
            if (fresh) {
                in.inputs.push_back(tokenize(row.input));
                in.variants.emplace_back();
            }
            in.variants[it->second].push_back(tokenize(row.output));
        }

        ContentScoreConfig ccfg;
        ccfg.lambda = opt.lambda;
        ccfg.threshold = opt.threshold;
        NgramStats stats = ngram_counts(sents1, sents2, ccfg.n);
        EvalReport report = evaluate_predictions(in, &classifier, embeddings, stats, ccfg);

        if (!opt.out.empty()) report.save(opt.out);
        if (report.style_available) {
            std::cout << "style_score = " << report.style_score << "\n";
        } else {
            std::cout << "style_score = withheld\n" << report.style_note << "\n";
        }
        std::cout << "content_score = " << report.content_score << "\n";
        for (const auto& [k, v] : report.diversity) {
            std::cout << "diversity_" << k << " = " << v << "\n";
        }
        std::cout << "bleu = " << report.bleu.score << " (";
        for (size_t i = 0; i < report.bleu.precisions.size(); ++i) {
            std::cout << (i ? "/" : "") << report.bleu.precisions[i];
        }
        std::cout << ")\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_train_embeddings(const TrainEmbeddingsOptions& opt) {
    try {
        auto s1 = load_sentences(opt.domain1);
        auto s2 = load_sentences(opt.domain2);
        std::vector<std::vector<std::string>> all(s1);
        all.insert(all.end(), s2.begin(), s2.end());
        EmbeddingTable table = train_embeddings(all, opt.dim, opt.epochs, opt.seed);
        table.save(opt.out);
        std::cout << "trained " << table.size() << " embeddings of dimension " << table.dim()
                  << ", wrote " << opt.out << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

int cmd_train_classifier(const TrainClassifierOptions& opt) {
    try {
        auto s1 = load_sentences(opt.domain1);
        auto s2 = load_sentences(opt.domain2);
        ClassifierTrainConfig cfg;
        cfg.seed = opt.seed;
        cfg.epochs = opt.epochs;
        TextClassifier clf = train_style_classifier(s1, s2, cfg);
        clf.save(opt.out);
        std::cout << "classifier validation accuracy: " << 100.0 * clf.val_accuracy
                  << "%, wrote " << opt.out << "\n";
        if (clf.val_accuracy < kStyleGate) {
            std::cerr << "warning: accuracy is below the " << 100.0 * kStyleGate
                      << "% gate; style scores will be withheld\n";
        }
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

}  // namespace polystyle::cli
