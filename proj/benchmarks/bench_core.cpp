#include <benchmark/benchmark.h>

#include <random>

#include "polystyle/inference.hpp"
#include "polystyle/metrics.hpp"
#include "polystyle/training.hpp"

using namespace polystyle;

namespace {

Tensor random_tensor(std::vector<int> shape, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    int n = 1;
    for (int d : shape) n *= d;
    std::vector<double> data(static_cast<size_t>(n));
    for (double& v : data) v = dist(rng);
    return Tensor(std::move(shape), std::move(data));
}

ModelParams bench_model(int d, int vocab) {
    Hyperparams hp;
    hp.d = d;
    hp.vocab_size = vocab;
    ModelParams p = ModelParams::init(hp, 7);
    p.trained = true;
    return p;
}

Batch bench_batch(int rows, int len, int vocab, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> tok(4, vocab - 1);
    std::vector<std::vector<int>> seqs;
    for (int r = 0; r < rows; ++r) {
        std::vector<int> s;
        for (int i = 0; i < len; ++i) s.push_back(tok(rng));
        seqs.push_back(std::move(s));
    }
    return make_batches(seqs, rows, seed)[0];
}

void BM_Conv1dForward(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const int d = static_cast<int>(state.range(1));
    Tensor x = random_tensor({m, d}, 1);
    Tensor w = random_tensor({2 * d, 3, d}, 2);
    Tensor b = random_tensor({2 * d}, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv1d(x, w, b, 1, 1).data().data());
    }
}
BENCHMARK(BM_Conv1dForward)->Args({10, 32})->Args({25, 64});

void BM_Conv1dBackward(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const int d = static_cast<int>(state.range(1));
    for (auto _ : state) {
        Tensor x = Tensor::parameter({m, d}, random_tensor({m, d}, 1).data());
        Tensor w = Tensor::parameter({2 * d, 3, d}, random_tensor({2 * d, 3, d}, 2).data());
        Tensor b = Tensor::parameter({2 * d}, random_tensor({2 * d}, 3).data());
        Tape tape;
        Tensor loss = mean_all(conv1d(x, w, b, 1, 1));
        tape.backward(loss);
        benchmark::DoNotOptimize(w.grad().data());
    }
}
BENCHMARK(BM_Conv1dBackward)->Args({10, 32})->Args({25, 64});

void BM_Compose(benchmark::State& state) {
    Tensor c = random_tensor({25, 64}, 4);
    Tensor mu = random_tensor({64}, 5);
    Tensor sigma = random_tensor({64}, 6);
    for (double& v : sigma.data()) v = 0.1 + std::abs(v);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            compose(ContentCode{c}, StyleCode{mu, sigma}).values.data().data());
    }
}
BENCHMARK(BM_Compose);

void BM_GreedyDecode(benchmark::State& state) {
    ModelParams params = bench_model(32, 50);
    Tensor z = random_tensor({10, 32}, 8);
    FusedCode fused{z};
    for (auto _ : state) {
        benchmark::DoNotOptimize(greedy_decode(params, 1, fused));
    }
}
BENCHMARK(BM_GreedyDecode);

void BM_Bleu(benchmark::State& state) {
    std::vector<std::string> hyp, ref;
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> pick(0, 9);
    for (int i = 0; i < 20; ++i) hyp.push_back(std::to_string(pick(rng)));
    for (int i = 0; i < 20; ++i) ref.push_back(std::to_string(pick(rng)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bleu(hyp, {ref}).score);
    }
}
BENCHMARK(BM_Bleu);

void BM_FullTrainStep(benchmark::State& state) {
    const int vocab = 40;
    ModelParams params = bench_model(static_cast<int>(state.range(0)), vocab);
    Batch b1 = bench_batch(8, 8, vocab, 11);
    Batch b2 = bench_batch(8, 8, vocab, 12);
    auto g_params = params.generator_params();
    auto d_params = params.discriminator_params();
    for (auto _ : state) {
        {
            Tape tape;
            auto adv = adversarial_losses(params, b1, b2);
            Tensor total_d = add(adv[0].d_loss, adv[1].d_loss);
            tape.backward(total_d);
            sgd_step(d_params, 0.1);
        }
        {
            Tape tape;
            FreezeGuard freeze(d_params);
            Tensor total = add(reconstruction_loss(params, 1, b1),
                               reconstruction_loss(params, 2, b2));
            auto bt = back_translation_forward(params, b1, b2, 1);
            total = add(total, add(bt.back, bt.mse));
            tape.backward(total);
            sgd_step(g_params, 0.1);
        }
    }
}
BENCHMARK(BM_FullTrainStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
