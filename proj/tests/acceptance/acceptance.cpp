// Acceptance suite: one binary, one pass/fail line per criterion.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "polystyle/inference.hpp"
#include "polystyle/metrics.hpp"
#include "polystyle/training.hpp"
#include "polystyle/validation.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace polystyle;
namespace ts = polystyle::testsupport;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw CheckFailure(what);
}

std::string fmt(double v, int prec = 2) {
    std::ostringstream os;
    os.precision(prec);
    os << std::fixed << v;
    return os.str();
}

// ---- shared synthetic benchmark (criteria 5-8) -------------------------------------

struct BenchConfig {
    int sentences_per_style = 2000;
    uint64_t seed = 42;
    int d = 32;
    int batch_size = 16;
    int epochs = 10;
};

TrainConfig bench_train_config(const BenchConfig& bench, LossToggles losses) {
    TrainConfig cfg;
    cfg.epochs = bench.epochs;
    cfg.batch_size = bench.batch_size;
    cfg.seed = bench.seed;
    cfg.losses = losses;
    cfg.val_fraction = 0.1;
    return cfg;
}

struct Benchmark {
    CorpusPair corpus;
    CorpusSplit split;  // same split train() uses (same seed + fraction)
    std::shared_ptr<ValidationAssets> assets;
    ModelParams full_model;
    double train_seconds = 0.0;

    static Benchmark build(const BenchConfig& bench) {
        Benchmark b{.corpus = ts::make_synthetic_pair(bench.sentences_per_style, bench.seed, 25),
                    .split = {},
                    .assets = nullptr,
                    .full_model = {},
                    .train_seconds = 0.0};
        b.split = split_validation(b.corpus, 0.1, bench.seed);
        b.assets = std::make_shared<ValidationAssets>(
            build_validation_assets(b.split.train, bench.seed));
        b.full_model = b.train_model(bench, LossToggles{});
        return b;
    }

    ModelParams train_model(const BenchConfig& bench, LossToggles losses) {
        Hyperparams hp;
        hp.d = bench.d;
        hp.vocab_size = corpus.vocab.size();
        ModelParams params = ModelParams::init(hp, bench.seed);
        params.vocab_hash = corpus.vocab.content_hash();
        TrainHooks hooks;
        hooks.scorer = make_validation_scorer(assets, bench.seed);
        const auto t0 = std::chrono::steady_clock::now();
        train(bench_train_config(bench, losses), corpus, params, hooks);
        train_seconds = seconds_since(t0);
        return params;
    }
};

std::unique_ptr<Benchmark> g_benchmark;
BenchConfig g_bench_config;

Benchmark& benchmark() {
    if (!g_benchmark) g_benchmark = std::make_unique<Benchmark>(Benchmark::build(g_bench_config));
    return *g_benchmark;
}

struct HeldOutScores {
    double style = 0.0;
    double content = 0.0;
    double bleu_vs_input = 0.0;
};

// Greedy one-donor transfer of the whole held-out slice, both directions
// pooled; style via the gated classifier, content vs the input, corpus BLEU
// of outputs against inputs.
HeldOutScores score_held_out(const ModelParams& params, const Benchmark& b, uint64_t seed) {
    DirectionOutputs d12 = transfer_direction(params, b.corpus.vocab, b.split.validation.domain1,
                                              b.split.validation.domain2, 1, seed);
    DirectionOutputs d21 = transfer_direction(params, b.corpus.vocab, b.split.validation.domain2,
                                              b.split.validation.domain1, 2, seed + 1);
    HeldOutScores out;
    int style_hits = 0, total = 0;
    double content_sum = 0.0;
    std::vector<std::vector<std::string>> hyps;
    std::vector<std::vector<std::vector<std::string>>> refs;
    auto tally = [&](const DirectionOutputs& dir, int target) {
        std::vector<std::vector<std::string>> outputs;
        for (size_t i = 0; i < dir.outputs.size(); ++i) {
            outputs.push_back(dir.outputs[i]);
            content_sum += content_score(dir.inputs[i], dir.outputs[i], b.assets->style_words,
                                         b.assets->embeddings);
            hyps.push_back(dir.outputs[i]);
            refs.push_back({dir.inputs[i]});
            ++total;
        }
        // The reporting gate applies: style_score throws below 90% accuracy.
        const double s = style_score(b.assets->classifier, outputs, target);
        style_hits += static_cast<int>(std::lround(s * outputs.size() / 100.0));
    };
    tally(d12, 2);
    tally(d21, 1);
    out.style = 100.0 * style_hits / total;
    out.content = content_sum / total;
    out.bleu_vs_input = corpus_bleu(hyps, refs).score;
    return out;
}

// ---- criterion 1: composition invariant ---------------------------------------------

std::string criterion1() {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> mdist(2, 25);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    std::uniform_real_distribution<double> sig(0.05, 3.0);
    const int d = 64;
    double worst_mu = 0.0, worst_sigma = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = mdist(rng);
        std::vector<double> cdata(static_cast<size_t>(m) * d);
        for (double& v : cdata) v = val(rng);
        std::vector<double> mu(d), sigma(d);
        for (double& v : mu) v = val(rng);
        for (double& v : sigma) v = sig(rng);
        FusedCode z = compose(ContentCode{Tensor({m, d}, std::move(cdata))},
                              StyleCode{Tensor({d}, mu), Tensor({d}, sigma)});
        for (int c = 0; c < d; ++c) {
            std::vector<double> col;
            col.reserve(static_cast<size_t>(m));
            for (int t = 0; t < m; ++t) col.push_back(z.values.data()[static_cast<size_t>(t) * d + c]);
            double mean = 0.0;
            for (double v : col) mean += v;
            mean /= m;
            worst_mu = std::max(worst_mu, std::abs(mean - mu[static_cast<size_t>(c)]));
            worst_sigma = std::max(worst_sigma, std::abs(ts::population_std_oracle(col) -
                                                         sigma[static_cast<size_t>(c)]));
        }
    }
    require(worst_mu < 1e-9, "mean deviation " + std::to_string(worst_mu) + " exceeds 1e-9");
    require(worst_sigma < 1e-6, "std deviation " + std::to_string(worst_sigma) + " exceeds 1e-6");
    std::ostringstream os;
    os << "1000 draws, max |mean-s_mu| " << worst_mu << ", max |std-s_sigma| " << worst_sigma;
    return os.str();
}

// ---- criterion 2: gradient correctness ----------------------------------------------

std::string criterion2() {
    Hyperparams hp;
    hp.d = 8;
    hp.vocab_size = 20;
    ModelParams params = ModelParams::init(hp, 2024);

    std::vector<std::vector<int>> rows1{{4, 9, 5}, {12, 6, 7, 8}};
    std::vector<std::vector<int>> rows2{{10, 11}, {13, 14, 15}};
    Batch b1 = make_batches(rows1, 2, 1)[0];
    Batch b2 = make_batches(rows2, 2, 2)[0];

    auto g_params = params.generator_params();
    auto d_params = params.discriminator_params();
    auto all_params = params.all_params();

    struct Term {
        const char* name;
        std::vector<NamedParam> groups;  // groups that receive gradient by design
        std::function<Tensor()> forward;
    };
    std::vector<Term> terms;
    terms.push_back({"reconstruction", all_params,
                     [&] { return add(reconstruction_loss(params, 1, b1),
                                      reconstruction_loss(params, 2, b2)); }});
    terms.push_back({"back_translation", all_params,
                     [&] { return back_translation_loss(params, b1, b2, 1); }});
    terms.push_back({"mse_bridge", all_params,
                     [&] { return mse_bridge_loss(params, b1, b2, 1); }});
    terms.push_back({"style_classification", all_params,
                     [&] { return add(style_classification_loss(params, 1, b1),
                                      style_classification_loss(params, 2, b2)); }});
    // The adversarial sides carry stop-gradients by design: the discriminator
    // loss detaches the encoders, the generator loss freezes the
    // discriminators. Finite differences are checked only over the parameter
    // groups each side trains.
    terms.push_back({"adversarial_d", d_params, [&] {
                         auto adv = adversarial_losses(params, b1, b2);
                         return add(adv[0].d_loss, adv[1].d_loss);
                     }});
    terms.push_back({"adversarial_g", g_params, [&] {
                         auto adv = adversarial_losses(params, b1, b2);
                         return add(adv[0].g_loss, adv[1].g_loss);
                     }});

    double worst = 0.0;
    int checked = 0;
    for (auto& term : terms) {
        auto report = ts::check_gradients(term.groups, term.forward, 3, 77, 1e-5, 1e-4);
        worst = std::max(worst, report.max_rel_error);
        checked += report.checked;
        if (!report.ok()) {
            const auto& f = report.failures.front();
            throw CheckFailure(std::string(term.name) + ": parameter '" + f.param + "'[" +
                               std::to_string(f.index) + "] analytic " + std::to_string(f.analytic) +
                               " vs fd " + std::to_string(f.fd) + " (rel " +
                               std::to_string(f.rel_error) + ")");
        }
    }
    std::ostringstream os;
    os << checked << " sampled entries across all five loss terms, max rel err " << worst;
    return os.str();
}

// ---- criterion 3: metric oracles ---------------------------------------------------

std::string criterion3() {
    std::mt19937_64 rng(3);
    static const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f"};
    auto sentence = [&](int min_len, int max_len) {
        std::uniform_int_distribution<int> len(min_len, max_len);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(words.size()) - 1);
        std::vector<std::string> s;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) s.push_back(words[static_cast<size_t>(pick(rng))]);
        return s;
    };

    for (int trial = 0; trial < 100; ++trial) {
        auto hyp = sentence(1, 12);
        std::vector<std::vector<std::string>> refs;
        for (int r = 0; r < 1 + trial % 3; ++r) refs.push_back(sentence(1, 12));
        BleuResult got = bleu(hyp, refs);
        auto want = ts::bleu_oracle(hyp, refs);
        require(std::abs(got.score - want.score) < 1e-9, "bleu score drifts from the oracle");
        require(std::abs(got.brevity_penalty - want.brevity_penalty) < 1e-9,
                "brevity penalty drifts from the oracle");
        for (int n = 0; n < 4; ++n) {
            require(std::abs(got.precisions[static_cast<size_t>(n)] -
                             want.precisions[static_cast<size_t>(n)]) < 1e-9,
                    "bleu precision drifts from the oracle");
        }
    }

    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<std::vector<std::string>>> sets;
        for (int i = 0; i < 2; ++i) {
            std::vector<std::vector<std::string>> set;
            for (int v = 0; v < 5; ++v) set.push_back(sentence(1, 8));
            sets.push_back(std::move(set));
        }
        for (int k : {2, 3, 4}) {
            require(std::abs(diversity_score(sets, k) - ts::diversity_oracle(sets, k)) < 1e-9,
                    "diversity drifts from the pairwise oracle");
        }
    }

    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<std::string>> c1, c2;
        for (int i = 0; i < 5; ++i) c1.push_back(sentence(1, 9));
        for (int i = 0; i < 5; ++i) c2.push_back(sentence(1, 9));
        NgramStats stats = ngram_counts(c1, c2, 1);
        for (const auto& w : words) {
            for (int dom : {1, 2}) {
                require(std::abs(style_magnitude(stats, w, dom, 1.0) -
                                 ts::style_magnitude_oracle(c1, c2, w, dom, 1.0)) < 1e-9,
                        "style magnitude drifts from the count oracle");
            }
        }
    }

    // Reporting format: exact zero score with per-n precisions still reported.
    BleuResult zero = bleu({"a", "b", "x", "c"}, {{"a", "b", "c", "d"}});
    require(zero.score == 0.0, "zero-precision case must score exactly 0");
    require(zero.precisions[0] > 0.0, "p1 must still be reported");
    require(zero.precisions[2] == 0.0, "p3 must be zero");
    std::ostringstream os;
    os << "bleu/diversity/style-magnitude match brute force on 100 cases each; zero-precision "
          "case reports "
       << fmt(zero.score) << " (" << fmt(zero.precisions[0], 1) << "/" << fmt(zero.precisions[1], 1)
       << "/" << fmt(zero.precisions[2], 1) << "/" << fmt(zero.precisions[3], 1) << ")";
    return os.str();
}

// ---- criterion 4: autoencoding sanity ------------------------------------------------

std::string criterion4() {
    CorpusPair pair = ts::make_synthetic_pair(100, 404, 25);  // 200 sentences total
    Hyperparams hp;
    hp.d = 16;
    hp.vocab_size = pair.vocab.size();
    ModelParams params = ModelParams::init(hp, 404);
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.seed = 404;
    cfg.val_fraction = 0.0;
    cfg.losses = {true, false, false, false, false};
    cfg.epochs = 200;

    double accuracy = 0.0;
    int reached_at = -1;
    TrainHooks hooks;
    hooks.on_epoch = [&](const EpochLog& log) {
        if (reached_at >= 0 || (log.epoch + 1) % 5 != 0) return;
        const double a1 = teacher_forced_token_accuracy(params, 1, pair.domain1);
        const double a2 = teacher_forced_token_accuracy(params, 2, pair.domain2);
        accuracy = std::min(a1, a2);
        if (accuracy >= 0.99) reached_at = log.epoch;
    };
    // Early exit by throwing once the bar is reached keeps the run short.
    struct Done {};
    try {
        TrainHooks wrapped = hooks;
        wrapped.on_epoch = [&](const EpochLog& log) {
            hooks.on_epoch(log);
            if (reached_at >= 0) throw Done{};
        };
        train(cfg, pair, params, wrapped);
    } catch (const Done&) {
    }
    if (reached_at < 0) {
        const double a1 = teacher_forced_token_accuracy(params, 1, pair.domain1);
        const double a2 = teacher_forced_token_accuracy(params, 2, pair.domain2);
        accuracy = std::min(a1, a2);
        if (accuracy >= 0.99) reached_at = cfg.epochs - 1;
    }
    require(reached_at >= 0, "teacher-forced accuracy " + fmt(100 * accuracy) +
                                 "% never reached 99% within 200 epochs");
    std::ostringstream os;
    os << "teacher-forced token accuracy " << fmt(100 * accuracy) << "% at epoch " << reached_at;
    return os.str();
}

// ---- criterion 5: synthetic end-to-end transfer --------------------------------------

std::string criterion5() {
    Benchmark& b = benchmark();
    HeldOutScores scores = score_held_out(b.full_model, b, 505);
    require(scores.style >= 90.0, "style score " + fmt(scores.style) + " below 90");
    require(scores.content >= 80.0, "content score " + fmt(scores.content) + " below 80");
    std::ostringstream os;
    os << "held-out style " << fmt(scores.style) << ", content " << fmt(scores.content)
       << " (training took " << fmt(b.train_seconds, 1) << " s)";
    return os.str();
}

// ---- criterion 6: one-to-many behavior ------------------------------------------------

std::string criterion6() {
    Benchmark& b = benchmark();
    const auto& inputs = b.split.validation.domain1;
    const int n_inputs = std::min<int>(100, static_cast<int>(inputs.size()));
    SamplingConfig cfg;
    cfg.num_variants = 5;

    int multi_output = 0;
    std::vector<std::vector<std::vector<std::string>>> sampled_sets, fixed_sets;
    for (int i = 0; i < n_inputs; ++i) {
        cfg.seed = 600 + static_cast<uint64_t>(i);
        auto variants =
            transfer(b.full_model, inputs[static_cast<size_t>(i)], 1, b.split.train.domain2, cfg,
                     b.corpus.vocab);
        std::set<std::vector<int>> distinct;
        std::vector<std::vector<std::string>> set;
        for (const auto& v : variants) {
            distinct.insert(v.tokens);
            set.push_back(b.corpus.vocab.decode(v.tokens));
        }
        if (distinct.size() >= 2) ++multi_output;
        sampled_sets.push_back(std::move(set));

        // Fixed-single-style-code comparator: the same donor for all variants.
        const auto& donor = b.split.train.domain2[0];
        std::vector<std::vector<std::string>> fixed;
        std::vector<int> one = transfer_with_donor(b.full_model, inputs[static_cast<size_t>(i)],
                                                   1, donor);
        for (int v = 0; v < 5; ++v) fixed.push_back(b.corpus.vocab.decode(one));
        fixed_sets.push_back(std::move(fixed));
    }
    const double frac = static_cast<double>(multi_output) / n_inputs;
    const double div_ours = diversity_score(sampled_sets, 2);
    const double div_fixed = diversity_score(fixed_sets, 2);
    require(frac >= 0.5, "only " + fmt(100 * frac) + "% of inputs had >= 2 distinct outputs");
    require(div_ours > div_fixed, "diversity-2 " + fmt(div_ours) +
                                      " does not exceed the fixed-style-code baseline " +
                                      fmt(div_fixed));
    std::ostringstream os;
    os << fmt(100 * frac) << "% of inputs gave >= 2 distinct outputs; diversity-2 "
       << fmt(div_ours) << " vs fixed-code " << fmt(div_fixed);
    return os.str();
}

// ---- criterion 7: ablation trend -----------------------------------------------------

std::string criterion7() {
    Benchmark& b = benchmark();
    LossToggles no_rec{false, true, true, true, true};
    LossToggles rec_only{true, false, false, false, false};
    ModelParams model_norec = b.train_model(g_bench_config, no_rec);
    ModelParams model_rec = b.train_model(g_bench_config, rec_only);

    HeldOutScores full = score_held_out(b.full_model, b, 505);
    HeldOutScores norec = score_held_out(model_norec, b, 505);
    HeldOutScores rec = score_held_out(model_rec, b, 505);

    std::ostringstream os;
    os << "BLEU(out, input): no-rec " << fmt(norec.bleu_vs_input) << ", full "
       << fmt(full.bleu_vs_input) << ", rec-only " << fmt(rec.bleu_vs_input)
       << "; style: rec-only " << fmt(rec.style) << ", full " << fmt(full.style) << ", no-rec "
       << fmt(norec.style);

    // (a) dropping reconstruction collapses BLEU; the full objective keeps it
    // substantially positive.
    require(norec.bleu_vs_input < 5.0,
            "no-reconstruction BLEU " + fmt(norec.bleu_vs_input) + " is not near 0 (" + os.str() + ")");
    require(full.bleu_vs_input > 20.0,
            "full-objective BLEU " + fmt(full.bleu_vs_input) + " is not substantially positive");
    // (b) the style loss raises the style score over reconstruction-only.
    require(full.style > rec.style,
            "style did not improve over reconstruction-only (" + os.str() + ")");
    // (c) the full objective sits strictly between the extremes on both axes.
    require(norec.bleu_vs_input < full.bleu_vs_input && full.bleu_vs_input < rec.bleu_vs_input,
            "BLEU ordering no-rec < full < rec-only violated (" + os.str() + ")");
    require(rec.style < full.style && full.style < norec.style,
            "style ordering rec-only < full < no-rec violated (" + os.str() + ")");
    return os.str();
}

// ---- criterion 8: retrieval sampling ---------------------------------------------------

std::string criterion8() {
    Benchmark& b = benchmark();
    const auto& val1 = b.split.validation.domain1;
    const auto& val2 = b.split.validation.domain2;
    auto run_scheme = [&](SamplingScheme scheme) {
        std::vector<std::vector<std::string>> outputs, inputs;
        auto one_direction = [&](const std::vector<std::vector<int>>& srcs,
                                 const std::vector<std::vector<int>>& donors, int source_domain,
                                 uint64_t seed) {
            SamplingConfig cfg;
            cfg.scheme = scheme;
            cfg.pool_size = 100;
            cfg.num_variants = 1;
            for (size_t i = 0; i < srcs.size(); ++i) {
                cfg.seed = seed + i;
                auto variants = transfer(b.full_model, srcs[i], source_domain, donors, cfg,
                                         b.corpus.vocab, &b.assets->embeddings);
                inputs.push_back(b.corpus.vocab.decode(srcs[i]));
                outputs.push_back(b.corpus.vocab.decode(variants[0].tokens));
            }
        };
        one_direction(val1, b.split.train.domain2, 1, 800);
        one_direction(val2, b.split.train.domain1, 2, 900);

        double content_sum = 0.0;
        for (size_t i = 0; i < outputs.size(); ++i) {
            content_sum += content_score(inputs[i], outputs[i], b.assets->style_words,
                                         b.assets->embeddings);
        }
        std::vector<std::vector<std::string>> out1(outputs.begin(),
                                                   outputs.begin() + static_cast<long>(val1.size()));
        std::vector<std::vector<std::string>> out2(outputs.begin() + static_cast<long>(val1.size()),
                                                   outputs.end());
        const double style = (style_score(b.assets->classifier, out1, 2) * out1.size() +
                              style_score(b.assets->classifier, out2, 1) * out2.size()) /
                             outputs.size();
        return std::make_pair(style, content_sum / outputs.size());
    };

    auto [style_u, content_u] = run_scheme(SamplingScheme::kUniform);
    auto [style_r, content_r] = run_scheme(SamplingScheme::kRetrieval);
    require(content_r >= content_u - 0.5,
            "retrieval content " + fmt(content_r) + " fell more than 0.5 below uniform " +
                fmt(content_u));
    require(std::abs(style_r - style_u) <= 2.0,
            "retrieval style " + fmt(style_r) + " deviates more than 2 points from uniform " +
                fmt(style_u));
    std::ostringstream os;
    os << "content " << fmt(content_u) << " -> " << fmt(content_r) << ", style " << fmt(style_u)
       << " -> " << fmt(style_r) << " (uniform -> retrieval)";
    return os.str();
}

// ---- criterion 9: reproducibility -------------------------------------------------------

std::string criterion9() {
    const fs::path dir = fs::temp_directory_path() / "polystyle_acceptance";
    fs::create_directories(dir);
    auto run = [&](const std::string& name) {
        CorpusPair pair = ts::make_synthetic_pair(60, 909, 25);
        Hyperparams hp;
        hp.d = 8;
        hp.vocab_size = pair.vocab.size();
        ModelParams params = ModelParams::init(hp, 909);
        params.vocab_hash = pair.vocab.content_hash();
        TrainConfig cfg;
        cfg.epochs = 3;
        cfg.batch_size = 8;
        cfg.seed = 909;
        cfg.val_fraction = 0.0;
        train(cfg, pair, params);
        const std::string path = (dir / name).string();
        save_checkpoint(params, path);
        return path;
    };
    const std::string path_a = run("a.ckpt");
    const std::string path_b = run("b.ckpt");
    std::ifstream fa(path_a, std::ios::binary), fb(path_b, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
    require(!bytes_a.empty() && bytes_a == bytes_b,
            "two identically-seeded runs produced different checkpoint bytes");

    // Round-trip: the reloaded checkpoint transfers identically.
    CorpusPair pair = ts::make_synthetic_pair(60, 909, 25);
    ModelParams original = load_checkpoint(path_a);
    ModelParams reloaded = load_checkpoint(path_b);
    SamplingConfig cfg;
    cfg.num_variants = 5;
    cfg.seed = 99;
    for (int i = 0; i < 10; ++i) {
        auto va = transfer(original, pair.domain1[static_cast<size_t>(i)], 1, pair.domain2, cfg,
                           pair.vocab);
        auto vb = transfer(reloaded, pair.domain1[static_cast<size_t>(i)], 1, pair.domain2, cfg,
                           pair.vocab);
        for (size_t v = 0; v < va.size(); ++v) {
            require(va[v].tokens == vb[v].tokens && va[v].donor_index == vb[v].donor_index,
                    "checkpoint round-trip changed transfer outputs");
        }
    }
    fs::remove_all(dir);
    return "bitwise-identical checkpoints (" + std::to_string(bytes_a.size()) +
           " bytes); round-trip transfer outputs identical";
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }

    const std::vector<Criterion> criteria = {
        {1, "composition invariant", 5.0, criterion1},
        {2, "gradient correctness", 120.0, criterion2},
        {3, "metric oracles", 30.0, criterion3},
        {4, "autoencoding sanity", 600.0, criterion4},
        {5, "synthetic end-to-end transfer", 1800.0, criterion5},
        {6, "one-to-many behavior", 1800.0, criterion6},
        {7, "ablation trend", 1800.0, criterion7},
        {8, "retrieval sampling", 1800.0, criterion8},
        {9, "reproducibility", 600.0, criterion9},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const std::string detail = c.run();
            const double dt = seconds_since(t0);
            if (dt > c.budget_seconds) {
                ++failures;
                std::cout << "[FAIL] criterion " << c.id << " (" << c.name << "): exceeded "
                          << c.budget_seconds << " s budget (" << fmt(dt, 1) << " s)\n";
            } else {
                std::cout << "[PASS] criterion " << c.id << " (" << c.name << "): " << detail
                          << " [" << fmt(dt, 1) << " s]\n";
            }
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] criterion " << c.id << " (" << c.name << "): " << e.what()
                      << " [" << fmt(seconds_since(t0), 1) << " s]\n";
        }
        std::cout.flush();
    }
    if (failures) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
