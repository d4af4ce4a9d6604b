#include "polystyle/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polystyle {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (d_steps_per_g_step < 1) throw std::invalid_argument("train: d_steps_per_g_step must be >= 1");
    if (convergence_window < 1) throw std::invalid_argument("train: convergence window must be >= 1");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
        throw std::invalid_argument("train: val_fraction must be in [0,1)");
    }
    if (!losses.reconstruction && !losses.back_translation) {
        throw std::invalid_argument("train: enable at least reconstruction or back-translation");
    }
    sgd.validate();
}

namespace {

constexpr double kLogitClip = 1e-7;

std::vector<int> frame(const std::vector<int>& raw) {
    std::vector<int> framed;
    framed.reserve(raw.size() + 2);
    framed.push_back(kBos);
    framed.insert(framed.end(), raw.begin(), raw.end());
    framed.push_back(kEos);
    return framed;
}

// Sum of teacher-forced NLL over the frame's targets (tokens after BOS).
Tensor sequence_nll_sum(const ModelParams& params, int domain, const FusedCode& fused,
                        const std::vector<int>& framed) {
    const std::vector<int> prefix(framed.begin(), framed.end() - 1);
    const std::vector<int> targets(framed.begin() + 1, framed.end());
    DecoderTrace trace = decoder_forward(params, domain, fused, prefix);
    Tensor picked = gather(log_softmax(trace.logits), targets);
    return scale(sum_all(picked), -1.0);
}

Tensor add_maybe(const Tensor& acc, const Tensor& v) {
    return acc.defined() ? add(acc, v) : v;
}

// -log of a clipped probability, mean-ready scalar.
Tensor clipped_nll(const Tensor& prob) {
    return scale(log(clamp(prob, kLogitClip, 1.0 - kLogitClip)), -1.0);
}

Tensor one_minus(const Tensor& t) {
    return add_scalar(scale(t, -1.0), 1.0);
}

void check_loss_value(const char* term, const Tensor& t) {
    if (!std::isfinite(t.value())) {
        throw numeric_error(std::string("train: loss term '") + term + "' is non-finite");
    }
}

}  // namespace

Tensor reconstruction_loss(ModelParams& params, int domain, const Batch& batch) {
    Tensor total;
    long long tokens = 0;
    for (int r = 0; r < batch.rows; ++r) {
        const std::vector<int> framed = frame(batch.row(r));
        ContentCode content = encode_content(params, domain, framed);
        StyleCode style = encode_style(params, domain, framed);
        FusedCode fused = compose(content, style);
        total = add_maybe(total, sequence_nll_sum(params, domain, fused, framed));
        tokens += static_cast<long long>(framed.size()) - 1;
    }
    return scale(total, 1.0 / static_cast<double>(tokens));
}

BackTranslationLosses back_translation_forward(ModelParams& params, const Batch& from,
                                               const Batch& to, int direction) {
    if (direction != 1 && direction != 2) {
        throw std::invalid_argument("back_translation: direction must be 1 or 2");
    }
    const int sd = direction;
    const int td = direction == 1 ? 2 : 1;
    Tensor back_total, mse_total;
    long long tokens = 0;
    for (int r = 0; r < from.rows; ++r) {
        const std::vector<int> f_src = frame(from.row(r));
        const std::vector<int> f_donor = frame(to.row(to.rows ? r % to.rows : 0));
        const int m = static_cast<int>(f_src.size());

        ContentTrace src = encode_content_trace(params, sd, f_src);
        StyleCode donor_style = encode_style(params, td, f_donor);
        FusedCode z_fwd = compose(ContentCode{src.code}, donor_style);

        // Greedy tokens for the forward transfer; no gradient flows through
        // the argmax picks, only through the activations of the re-run below.
        std::vector<int> prefix{kBos};
        {
            NoGradGuard no_grad;
            while (static_cast<int>(prefix.size()) < m) {
                Tensor probs = decode_step(params, td, z_fwd, prefix);
                const auto& p = probs.data();
                int best = 0;
                for (size_t i = 1; i < p.size(); ++i) {
                    if (p[i] > p[static_cast<size_t>(best)]) best = static_cast<int>(i);
                }
                prefix.push_back(best);
            }
        }

        DecoderTrace fwd = decoder_forward(params, td, z_fwd, prefix);
        Tensor projected = bridge(params, td, fwd.second_last);

        Tensor diff = sub(projected, src.hidden);
        mse_total = add_maybe(mse_total, mean_all(mul(diff, diff)));

        Tensor content_back = encode_content_tail(params, td, projected);
        StyleCode own_style = encode_style(params, sd, f_src);
        FusedCode z_back = compose(ContentCode{content_back}, own_style);
        back_total = add_maybe(back_total, sequence_nll_sum(params, sd, z_back, f_src));
        tokens += m - 1;
    }
    BackTranslationLosses out;
    out.back = scale(back_total, 1.0 / static_cast<double>(tokens));
    out.mse = scale(mse_total, 1.0 / static_cast<double>(from.rows));
    return out;
}

Tensor back_translation_loss(ModelParams& params, const Batch& batch1, const Batch& batch2,
                             int direction) {
    const Batch& from = direction == 1 ? batch1 : batch2;
    const Batch& to = direction == 1 ? batch2 : batch1;
    return back_translation_forward(params, from, to, direction).back;
}

Tensor mse_bridge_loss(ModelParams& params, const Batch& batch1, const Batch& batch2,
                       int direction) {
    const Batch& from = direction == 1 ? batch1 : batch2;
    const Batch& to = direction == 1 ? batch2 : batch1;
    return back_translation_forward(params, from, to, direction).mse;
}

Tensor style_classification_loss(ModelParams& params, int domain, const Batch& batch) {
    Tensor total;
    for (int r = 0; r < batch.rows; ++r) {
        const std::vector<int> framed = frame(batch.row(r));
        StyleCode style = encode_style(params, domain, framed);
        Tensor probs = classify_style(params, style);
        Tensor target = slice_vec(probs, domain - 1, domain);
        total = add_maybe(total, clipped_nll(target));
    }
    return scale(total, 1.0 / batch.rows);
}

std::array<AdversarialPair, 2> adversarial_losses(ModelParams& params, const Batch& batch1,
                                                  const Batch& batch2) {
    const int rows = std::min(batch1.rows, batch2.rows);
    if (rows == 0) throw std::invalid_argument("adversarial: empty batch");

    // Discriminator side: fused codes are constants (encoders detached).
    Tensor d_total[2];
    {
        for (int r = 0; r < rows; ++r) {
            FusedCode z1, z2, z12, z21;
            {
                NoGradGuard no_grad;
                const std::vector<int> f1 = frame(batch1.row(r));
                const std::vector<int> f2 = frame(batch2.row(r));
                ContentCode c1 = encode_content(params, 1, f1);
                ContentCode c2 = encode_content(params, 2, f2);
                StyleCode s1 = encode_style(params, 1, f1);
                StyleCode s2 = encode_style(params, 2, f2);
                z1 = compose(c1, s1);
                z2 = compose(c2, s2);
                z12 = compose(c1, s2);
                z21 = compose(c2, s1);
            }
            Tensor real2 = clipped_nll(discriminate(params, 2, z2));
            Tensor fake2 = clipped_nll(one_minus(discriminate(params, 2, z12)));
            d_total[1] = add_maybe(d_total[1], add(real2, fake2));
            Tensor real1 = clipped_nll(discriminate(params, 1, z1));
            Tensor fake1 = clipped_nll(one_minus(discriminate(params, 1, z21)));
            d_total[0] = add_maybe(d_total[0], add(real1, fake1));
        }
    }

    // Generator side: discriminators frozen, codes live.
    Tensor g_total[2];
    {
        FreezeGuard freeze_d(params.discriminator_params());
        for (int r = 0; r < rows; ++r) {
            const std::vector<int> f1 = frame(batch1.row(r));
            const std::vector<int> f2 = frame(batch2.row(r));
            ContentCode c1 = encode_content(params, 1, f1);
            ContentCode c2 = encode_content(params, 2, f2);
            StyleCode s1 = encode_style(params, 1, f1);
            StyleCode s2 = encode_style(params, 2, f2);
            FusedCode z12 = compose(c1, s2);
            FusedCode z21 = compose(c2, s1);
            g_total[1] = add_maybe(g_total[1], clipped_nll(discriminate(params, 2, z12)));
            g_total[0] = add_maybe(g_total[0], clipped_nll(discriminate(params, 1, z21)));
        }
    }

    std::array<AdversarialPair, 2> out;
    for (int i = 0; i < 2; ++i) {
        out[static_cast<size_t>(i)].d_loss = scale(d_total[i], 1.0 / rows);
        out[static_cast<size_t>(i)].g_loss = scale(g_total[i], 1.0 / rows);
    }
    return out;
}

double teacher_forced_token_accuracy(const ModelParams& params, int domain,
                                     const std::vector<std::vector<int>>& sequences) {
    NoGradGuard no_grad;
    long long hits = 0, total = 0;
    for (const auto& raw : sequences) {
        const std::vector<int> framed = frame(raw);
        ContentCode content = encode_content(params, domain, framed);
        StyleCode style = encode_style(params, domain, framed);
        FusedCode fused = compose(content, style);
        const std::vector<int> prefix(framed.begin(), framed.end() - 1);
        DecoderTrace trace = decoder_forward(params, domain, fused, prefix);
        const int v = trace.logits.dim(1);
        for (size_t t = 0; t + 1 < framed.size(); ++t) {
            const double* row = trace.logits.data().data() + t * static_cast<size_t>(v);
            int best = 0;
            for (int j = 1; j < v; ++j) {
                if (row[j] > row[best]) best = j;
            }
            if (best == framed[t + 1]) ++hits;
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

// ---- training loop ---------------------------------------------------------------

namespace {

struct EpochAccum {
    LossReport sums;
    int batches = 0;

    void add(const LossReport& r) {
        sums.rec1 += r.rec1;
        sums.rec2 += r.rec2;
        sums.back1 += r.back1;
        sums.back2 += r.back2;
        sums.mse1 += r.mse1;
        sums.mse2 += r.mse2;
        sums.cls1 += r.cls1;
        sums.cls2 += r.cls2;
        sums.adv1_g += r.adv1_g;
        sums.adv2_g += r.adv2_g;
        sums.adv1_d += r.adv1_d;
        sums.adv2_d += r.adv2_d;
        sums.total_g += r.total_g;
        sums.total_d += r.total_d;
        ++batches;
    }

    LossReport mean() const {
        LossReport m = sums;
        const double inv = batches ? 1.0 / batches : 0.0;
        m.rec1 *= inv;
        m.rec2 *= inv;
        m.back1 *= inv;
        m.back2 *= inv;
        m.mse1 *= inv;
        m.mse2 *= inv;
        m.cls1 *= inv;
        m.cls2 *= inv;
        m.adv1_g *= inv;
        m.adv2_g *= inv;
        m.adv1_d *= inv;
        m.adv2_d *= inv;
        m.total_g *= inv;
        m.total_d *= inv;
        return m;
    }
};

double term_value(const char* name, const Tensor& t) {
    if (!std::isfinite(t.value())) {
        throw numeric_error(std::string("train: loss term '") + name + "' is non-finite");
    }
    return t.value();
}

}  // namespace

std::string epoch_log_header() {
    return "epoch\trec1\trec2\tback1\tback2\tmse1\tmse2\tcls1\tcls2\tadv1_g\tadv2_g\tadv1_d"
           "\tadv2_d\ttotal_g\ttotal_d\tval_style\tval_content\tlr";
}

std::string format_epoch_log(const EpochLog& log) {
    std::ostringstream os;
    os.precision(10);
    const LossReport& r = log.losses;
    os << log.epoch << '\t' << r.rec1 << '\t' << r.rec2 << '\t' << r.back1 << '\t' << r.back2
       << '\t' << r.mse1 << '\t' << r.mse2 << '\t' << r.cls1 << '\t' << r.cls2 << '\t'
       << r.adv1_g << '\t' << r.adv2_g << '\t' << r.adv1_d << '\t' << r.adv2_d << '\t'
       << r.total_g << '\t' << r.total_d << '\t' << log.val_style << '\t' << log.val_content
       << '\t' << log.learning_rate;
    return os.str();
}

std::vector<EpochLog> train(const TrainConfig& config, const CorpusPair& corpus,
                            ModelParams& params, const TrainHooks& hooks) {
    config.validate();
    corpus.validate();
    if (corpus.domain1.empty() || corpus.domain2.empty()) {
        throw std::invalid_argument("train: both domains need sentences");
    }

    CorpusSplit split = split_validation(corpus, hooks.scorer ? config.val_fraction : 0.0,
                                         config.seed);
    params.trained = true;

    auto g_params = params.generator_params();
    auto d_params = params.discriminator_params();
    const LossToggles& on = config.losses;

    double lr = config.sgd.learning_rate;
    bool decaying = false;
    std::vector<std::pair<double, double>> score_history;
    std::vector<EpochLog> logs;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const uint64_t epoch_seed = config.seed + 1000003ull * static_cast<uint64_t>(epoch);
        auto batches1 = make_batches(split.train.domain1, config.batch_size, epoch_seed + 1);
        auto batches2 = make_batches(split.train.domain2, config.batch_size, epoch_seed + 2);
        const size_t steps = std::min(batches1.size(), batches2.size());

        EpochAccum accum;
        for (size_t i = 0; i < steps; ++i) {
            const Batch& b1 = batches1[i];
            const Batch& b2 = batches2[i];
            LossReport report;

            if (on.adversarial) {
                for (int k = 0; k < config.d_steps_per_g_step; ++k) {
                    Tape tape;
                    auto adv = adversarial_losses(params, b1, b2);
                    Tensor total_d = add(adv[0].d_loss, adv[1].d_loss);
                    report.adv1_d = term_value("adv1_d", adv[0].d_loss);
                    report.adv2_d = term_value("adv2_d", adv[1].d_loss);
                    report.total_d = term_value("total_d", total_d);
                    tape.backward(total_d);
                    sgd_step(d_params, lr);
                }
            }

            {
                Tape tape;
                FreezeGuard freeze_d(d_params);
                Tensor total_g;
                if (on.reconstruction) {
                    Tensor rec1 = reconstruction_loss(params, 1, b1);
                    Tensor rec2 = reconstruction_loss(params, 2, b2);
                    report.rec1 = term_value("rec1", rec1);
                    report.rec2 = term_value("rec2", rec2);
                    total_g = add_maybe(total_g, add(rec1, rec2));
                }
                if (on.back_translation || on.mse_bridge) {
                    auto bt1 = back_translation_forward(params, b1, b2, 1);
                    auto bt2 = back_translation_forward(params, b2, b1, 2);
                    if (on.back_translation) {
                        report.back1 = term_value("back1", bt1.back);
                        report.back2 = term_value("back2", bt2.back);
                        total_g = add_maybe(total_g, add(bt1.back, bt2.back));
                    }
                    if (on.mse_bridge) {
                        report.mse1 = term_value("mse1", bt1.mse);
                        report.mse2 = term_value("mse2", bt2.mse);
                        total_g = add_maybe(total_g, add(bt1.mse, bt2.mse));
                    }
                }
                if (on.style_classification) {
                    Tensor cls1 = style_classification_loss(params, 1, b1);
                    Tensor cls2 = style_classification_loss(params, 2, b2);
                    report.cls1 = term_value("cls1", cls1);
                    report.cls2 = term_value("cls2", cls2);
                    total_g = add_maybe(total_g, add(cls1, cls2));
                }
                if (on.adversarial) {
                    const int rows = std::min(b1.rows, b2.rows);
                    Tensor g1_total, g2_total;
                    for (int r = 0; r < rows; ++r) {
                        const std::vector<int> f1 = frame(b1.row(r));
                        const std::vector<int> f2 = frame(b2.row(r));
                        ContentCode c1 = encode_content(params, 1, f1);
                        ContentCode c2 = encode_content(params, 2, f2);
                        StyleCode s1 = encode_style(params, 1, f1);
                        StyleCode s2 = encode_style(params, 2, f2);
                        g2_total = add_maybe(
                            g2_total, clipped_nll(discriminate(params, 2, compose(c1, s2))));
                        g1_total = add_maybe(
                            g1_total, clipped_nll(discriminate(params, 1, compose(c2, s1))));
                    }
                    Tensor g1 = scale(g1_total, 1.0 / rows);
                    Tensor g2 = scale(g2_total, 1.0 / rows);
                    report.adv1_g = term_value("adv1_g", g1);
                    report.adv2_g = term_value("adv2_g", g2);
                    total_g = add_maybe(total_g, add(g1, g2));
                }
                report.total_g = term_value("total_g", total_g);
                tape.backward(total_g);
                sgd_step(g_params, lr);
            }
            accum.add(report);
        }

        EpochLog log;
        log.epoch = epoch;
        log.losses = accum.mean();
        log.learning_rate = lr;

        if (hooks.scorer) {
            auto [style, content] = hooks.scorer(params, split.validation, epoch);
            log.val_style = style;
            log.val_content = content;
            score_history.emplace_back(style, content);
            if (!decaying &&
                static_cast<int>(score_history.size()) >= config.convergence_window) {
                double style_lo = score_history.back().first, style_hi = style_lo;
                double content_lo = score_history.back().second, content_hi = content_lo;
                for (int w = 0; w < config.convergence_window; ++w) {
                    const auto& [s, c] = score_history[score_history.size() - 1 - w];
                    style_lo = std::min(style_lo, s);
                    style_hi = std::max(style_hi, s);
                    content_lo = std::min(content_lo, c);
                    content_hi = std::max(content_hi, c);
                }
                if (style_hi - style_lo < 1.0 && content_hi - content_lo < 1.0) decaying = true;
            }
            if (decaying) {
                lr = std::max(lr * config.sgd.decay_factor, config.sgd.min_learning_rate);
            }
        }

        if (hooks.on_epoch) hooks.on_epoch(log);
        if (hooks.on_checkpoint && hooks.checkpoint_every > 0 &&
            (epoch + 1) % hooks.checkpoint_every == 0) {
            hooks.on_checkpoint(params, epoch);
        }
        logs.push_back(log);
    }
    if (hooks.on_checkpoint) hooks.on_checkpoint(params, config.epochs - 1);
    return logs;
}

}  // namespace polystyle
