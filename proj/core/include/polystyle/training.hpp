#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polystyle/corpus.hpp"
#include "polystyle/model.hpp"
#include "polystyle/tensor.hpp"

namespace polystyle {

struct LossToggles {
    bool reconstruction = true;
    bool back_translation = true;
    bool mse_bridge = true;
    bool style_classification = true;
    bool adversarial = true;
};

struct TrainConfig {
    int epochs = 10;
    int batch_size = 16;
    uint64_t seed = 1;
    SgdConfig sgd;
    LossToggles losses;
    int d_steps_per_g_step = 1;
    int convergence_window = 3;
    double val_fraction = 0.1;

    void validate() const;
};

struct LossReport {
    double rec1 = 0, rec2 = 0;
    double back1 = 0, back2 = 0;
    double mse1 = 0, mse2 = 0;
    double cls1 = 0, cls2 = 0;
    double adv1_g = 0, adv2_g = 0;
    double adv1_d = 0, adv2_d = 0;
    double total_g = 0, total_d = 0;
};

struct EpochLog {
    int epoch = 0;
    LossReport losses;
    double val_style = -1.0;    // -1 when no scorer ran
    double val_content = -1.0;
    double learning_rate = 0.0;
};

// Tab-separated, one line per epoch; the header order is fixed.
std::string epoch_log_header();
std::string format_epoch_log(const EpochLog& log);

// (style score, content score) on a held-out slice; composed by the caller so
// training stays independent of the metric stack.
using ValidationScorer =
    std::function<std::pair<double, double>(const ModelParams&, const CorpusPair& validation,
                                            int epoch)>;

struct TrainHooks {
    ValidationScorer scorer;
    std::function<void(const EpochLog&)> on_epoch;
    std::function<void(ModelParams&, int epoch)> on_checkpoint;
    int checkpoint_every = 0;  // epochs; 0 = final checkpoint only
};

// ---- individual loss terms --------------------------------------------------------
// All take framed batches from corpus::make_batches over raw sequences; the
// functions frame rows with BOS/EOS internally. Results are scalar tensors on
// the active tape.

// Mean per-token NLL of teacher-forced reconstruction through
// compose(E^c(x), E^s(x)) and G.
Tensor reconstruction_loss(ModelParams& params, int domain, const Batch& batch);

struct BackTranslationLosses {
    Tensor back;  // mean per-token NLL of the round trip
    Tensor mse;   // mean squared bridge error against E^{c,h}(x)
};
// direction = source domain of the round trip (1 for x1->2->1).
BackTranslationLosses back_translation_forward(ModelParams& params, const Batch& from,
                                               const Batch& to, int direction);
Tensor back_translation_loss(ModelParams& params, const Batch& batch1, const Batch& batch2,
                             int direction);
Tensor mse_bridge_loss(ModelParams& params, const Batch& batch1, const Batch& batch2,
                       int direction);

Tensor style_classification_loss(ModelParams& params, int domain, const Batch& batch);

struct AdversarialPair {
    Tensor d_loss;  // -[log D(z_real) + log(1 - D(z_fake))], encoders detached
    Tensor g_loss;  // -log D(z_fake), discriminator frozen (non-saturating)
};
// Index 0 holds domain 1 (fakes from 2->1), index 1 domain 2.
std::array<AdversarialPair, 2> adversarial_losses(ModelParams& params, const Batch& batch1,
                                                  const Batch& batch2);

// Teacher-forced argmax accuracy over a raw-sequence corpus slice.
double teacher_forced_token_accuracy(const ModelParams& params, int domain,
                                     const std::vector<std::vector<int>>& sequences);

// Alternating min-max training per Eq.-style unweighted sum of the enabled
// terms: d_steps_per_g_step discriminator updates then one generator update
// per batch pair. Evaluates validation scores per epoch when a scorer is
// given; once both scores move by < 1 point over the convergence window the
// learning rate decays by decay_factor per epoch down to min_learning_rate.
std::vector<EpochLog> train(const TrainConfig& config, const CorpusPair& corpus,
                            ModelParams& params, const TrainHooks& hooks = {});

}  // namespace polystyle
