#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "polystyle/corpus.hpp"
#include "polystyle/model.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace polystyle;
namespace ts = polystyle::testsupport;
namespace fs = std::filesystem;

namespace {

Hyperparams tiny_hp(int d = 8, int vocab = 20) {
    Hyperparams hp;
    hp.d = d;
    hp.vocab_size = vocab;
    hp.max_len = 25;
    return hp;
}

std::vector<int> frame_of(std::initializer_list<int> raw) {
    std::vector<int> out{kBos};
    out.insert(out.end(), raw.begin(), raw.end());
    out.push_back(kEos);
    return out;
}

Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    int n = 1;
    for (int dm : shape) n *= dm;
    std::vector<double> data(static_cast<size_t>(n));
    for (double& v : data) v = dist(rng);
    return Tensor(std::move(shape), std::move(data));
}

}  // namespace

TEST_CASE("encode_content preserves length for every m up to max_len") {
    ModelParams params = ModelParams::init(tiny_hp(), 3);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> tok(4, params.hp.vocab_size - 1);
    for (int m = 1; m <= params.hp.max_len; ++m) {
        std::vector<int> framed{kBos};
        for (int i = 0; i < m; ++i) framed.push_back(tok(rng));
        framed.push_back(kEos);
        ContentCode code = encode_content(params, 1, framed);
        CHECK(code.values.dim(0) == static_cast<int>(framed.size()));
        CHECK(code.values.dim(1) == params.hp.d);
    }
    CHECK_THROWS_AS(encode_content(params, 1, {}), std::invalid_argument);
}

TEST_CASE("encode_content with d=64 traces to the declared shape and is deterministic") {
    Hyperparams hp = tiny_hp(64, 30);
    ModelParams params = ModelParams::init(hp, 12);
    const std::vector<int> framed = frame_of({4, 5, 6, 7, 8});  // m = 7 framed
    ContentCode a = encode_content(params, 2, framed);
    ContentCode b = encode_content(params, 2, framed);
    CHECK(a.values.shape() == std::vector<int>{7, 64});
    CHECK(a.values.data() == b.values.data());  // bitwise
}

TEST_CASE("encode_style emits positive sigma of width d") {
    ModelParams params = ModelParams::init(tiny_hp(16), 5);
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> tok(4, params.hp.vocab_size - 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> framed{kBos};
        const int m = 1 + trial % 9;
        for (int i = 0; i < m; ++i) framed.push_back(tok(rng));
        framed.push_back(kEos);
        StyleCode s = encode_style(params, 1 + trial % 2, framed);
        CHECK(s.mu.shape() == std::vector<int>{16});
        CHECK(s.sigma.shape() == std::vector<int>{16});
        for (double v : s.sigma.data()) CHECK(v > 0.0);
    }
}

TEST_CASE("compose substitutes the target statistics") {
    // c = [[1],[3]]: mu=2, population std=1; s=(0,1) -> z=[[-1],[1]].
    ContentCode c{Tensor({2, 1}, {1, 3})};
    StyleCode s{Tensor({1}, {0.0}), Tensor({1}, {1.0})};
    FusedCode z = compose(c, s);
    CHECK(z.values.data()[0] == doctest::Approx(-1.0));
    CHECK(z.values.data()[1] == doctest::Approx(1.0));
}

TEST_CASE("compose is the identity for matching statistics") {
    std::mt19937_64 rng(8);
    Tensor raw = random_tensor({6, 3}, rng);
    ContentCode c{raw};
    StyleCode s{mean_over_positions(raw), std_over_positions(raw)};
    FusedCode z = compose(c, s);
    for (size_t i = 0; i < raw.data().size(); ++i) {
        CHECK(z.values.data()[i] == doctest::Approx(raw.data()[i]).epsilon(1e-9));
    }

    // Zero-mean unit-std channels with s=(0,1) reproduce c exactly.
    Tensor unit({4, 1}, {-1.5, -0.5, 0.5, 1.5});
    Tensor norm = row_div(row_sub(unit, mean_over_positions(unit)), std_over_positions(unit));
    FusedCode id = compose(ContentCode{norm}, StyleCode{Tensor({1}, {0.0}), Tensor({1}, {1.0})});
    for (size_t i = 0; i < norm.data().size(); ++i) {
        CHECK(id.values.data()[i] == doctest::Approx(norm.data()[i]).epsilon(1e-9));
    }
}

TEST_CASE("compose output matches requested stats against the two-pass oracle") {
    std::mt19937_64 rng(9);
    Tensor raw = random_tensor({3, 2}, rng);
    StyleCode s{Tensor({2}, {5.0, -5.0}), Tensor({2}, {2.0, 0.5})};
    FusedCode z = compose(ContentCode{raw}, s);
    for (int ch = 0; ch < 2; ++ch) {
        std::vector<double> col;
        for (int t = 0; t < 3; ++t) col.push_back(z.values.data()[static_cast<size_t>(t) * 2 + ch]);
        double mean = (col[0] + col[1] + col[2]) / 3.0;
        CHECK(mean == doctest::Approx(s.mu.data()[static_cast<size_t>(ch)]).epsilon(1e-9));
        CHECK(ts::population_std_oracle(col) ==
              doctest::Approx(s.sigma.data()[static_cast<size_t>(ch)]).epsilon(1e-9));
    }
}

TEST_CASE("fused statistics invariant holds over random draws") {
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> mdist(2, 25);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = mdist(rng), d = 5;
        Tensor c = random_tensor({m, d}, rng, -2.0, 2.0);
        Tensor mu = random_tensor({d}, rng, -3.0, 3.0);
        Tensor sigma = random_tensor({d}, rng, 0.1, 2.5);
        FusedCode z = compose(ContentCode{c}, StyleCode{mu, sigma});
        Tensor got_mu = mean_over_positions(z.values);
        Tensor got_sd = std_over_positions(z.values);
        for (int ch = 0; ch < d; ++ch) {
            CHECK(std::abs(got_mu.data()[static_cast<size_t>(ch)] - mu.data()[static_cast<size_t>(ch)]) < 1e-9);
            CHECK(std::abs(got_sd.data()[static_cast<size_t>(ch)] - sigma.data()[static_cast<size_t>(ch)]) < 1e-6);
        }
    }
}

TEST_CASE("decode_step returns a vocab-sized distribution") {
    ModelParams params = ModelParams::init(tiny_hp(8, 50), 21);
    std::mt19937_64 rng(2);
    FusedCode fused{random_tensor({5, 8}, rng)};
    Tensor probs = decode_step(params, 1, fused, {kBos, 4, 5});
    CHECK(probs.shape() == std::vector<int>{50});
    double sum = 0;
    for (double v : probs.data()) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(decode_step(params, 1, fused, {4, 5}), std::invalid_argument);
}

TEST_CASE("decoder is causal: future prefix tokens do not change earlier steps") {
    ModelParams params = ModelParams::init(tiny_hp(8, 20), 22);
    std::mt19937_64 rng(23);
    FusedCode fused{random_tensor({6, 8}, rng)};
    std::vector<int> prefix{kBos, 4, 5, 6, 7};
    DecoderTrace base = decoder_forward(params, 1, fused, prefix);
    for (size_t flip = 2; flip < prefix.size(); ++flip) {
        std::vector<int> changed = prefix;
        changed[flip] = 9;
        DecoderTrace alt = decoder_forward(params, 1, fused, changed);
        const int v = base.logits.dim(1);
        for (size_t t = 0; t < flip; ++t) {
            for (int j = 0; j < v; ++j) {
                CHECK(base.logits.data()[t * static_cast<size_t>(v) + j] ==
                      alt.logits.data()[t * static_cast<size_t>(v) + j]);
            }
        }
    }
}

TEST_CASE("discriminate stays in (0,1) and is deterministic") {
    ModelParams params = ModelParams::init(tiny_hp(), 31);
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        FusedCode z{random_tensor({3 + trial, 8}, rng, -3.0, 3.0)};
        const double a = discriminate(params, 1, z).value();
        const double b = discriminate(params, 1, z).value();
        CHECK(a > 0.0);
        CHECK(a < 1.0);
        CHECK(a == b);
    }
}

TEST_CASE("discriminator trained on separable codes reaches AUC > 0.9") {
    ModelParams params = ModelParams::init(tiny_hp(8), 41);
    auto d_params = params.discriminator_params();
    std::mt19937_64 rng(42);
    std::normal_distribution<double> noise(0.0, 0.5);
    auto make_code = [&](double center) {
        std::vector<double> data(4 * 8);
        for (double& v : data) v = center + noise(rng);
        return FusedCode{Tensor({4, 8}, std::move(data))};
    };
    for (int step = 0; step < 300; ++step) {
        Tape tape;
        FusedCode real = make_code(1.0), fake = make_code(-1.0);
        Tensor loss = scale(
            add(log(clamp(discriminate(params, 1, real), 1e-7, 1 - 1e-7)),
                log(clamp(add_scalar(scale(discriminate(params, 1, fake), -1.0), 1.0), 1e-7,
                          1 - 1e-7))),
            -1.0);
        tape.backward(loss);
        sgd_step(d_params, 0.1);
    }
    // AUC by pairwise comparison on fresh draws.
    std::vector<double> real_scores, fake_scores;
    for (int i = 0; i < 50; ++i) {
        real_scores.push_back(discriminate(params, 1, make_code(1.0)).value());
        fake_scores.push_back(discriminate(params, 1, make_code(-1.0)).value());
    }
    double wins = 0;
    for (double r : real_scores) {
        for (double f : fake_scores) wins += r > f ? 1.0 : (r == f ? 0.5 : 0.0);
    }
    CHECK(wins / (50.0 * 50.0) > 0.9);
}

TEST_CASE("classify_style sums to one and separable codes train to >= 95%") {
    ModelParams params = ModelParams::init(tiny_hp(8), 51);
    std::mt19937_64 rng(52);
    std::normal_distribution<double> noise(0.0, 0.3);
    auto make_style = [&](int domain) {
        const double center = domain == 1 ? -1.0 : 1.0;
        std::vector<double> mu(8), sg(8);
        for (double& v : mu) v = center + noise(rng);
        for (double& v : sg) v = 1.0 + 0.1 * std::abs(noise(rng));
        return StyleCode{Tensor({8}, std::move(mu)), Tensor({8}, std::move(sg))};
    };
    StyleCode probe = make_style(1);
    Tensor probs = classify_style(params, probe);
    CHECK(probs.data()[0] + probs.data()[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(classify_style(params, probe).data() == probs.data());  // deterministic

    std::vector<NamedParam> head{{"c1.w", params.classifier1.w},
                                 {"c1.b", params.classifier1.b},
                                 {"c2.w", params.classifier2.w},
                                 {"c2.b", params.classifier2.b}};
    for (int step = 0; step < 400; ++step) {
        const int domain = 1 + step % 2;
        Tape tape;
        Tensor p = classify_style(params, make_style(domain));
        Tensor nll = scale(log(clamp(slice_vec(p, domain - 1, domain), 1e-7, 1.0 - 1e-7)), -1.0);
        tape.backward(nll);
        sgd_step(head, 0.1);
    }
    int hits = 0;
    for (int i = 0; i < 200; ++i) {
        const int domain = 1 + i % 2;
        Tensor p = classify_style(params, make_style(domain));
        hits += (p.data()[1] > p.data()[0] ? 2 : 1) == domain;
    }
    CHECK(hits >= 190);
}

TEST_CASE("bridge maps per position and reduces to layer-2 bias on zero input") {
    ModelParams params = ModelParams::init(tiny_hp(8), 61);
    std::mt19937_64 rng(62);
    Tensor h = random_tensor({5, 8}, rng);
    Tensor out = bridge(params, 2, h);
    CHECK(out.shape() == std::vector<int>{5, 8});

    DomainParams& dom = params.domains[1];
    std::fill(dom.bridge1.b.data().begin(), dom.bridge1.b.data().end(), 0.0);
    Tensor zeros({3, 8});
    Tensor reduced = bridge(params, 2, zeros);
    for (int t = 0; t < 3; ++t) {
        for (int c = 0; c < 8; ++c) {
            CHECK(reduced.data()[static_cast<size_t>(t) * 8 + c] ==
                  doctest::Approx(dom.bridge2.b.data()[static_cast<size_t>(c)]));
        }
    }
}

TEST_CASE("bridge output stays differentiable end to end") {
    ModelParams params = ModelParams::init(tiny_hp(4, 12), 71);
    std::mt19937_64 rng(72);
    Tensor h = random_tensor({4, 4}, rng);
    auto fwd = [&] { return mean_all(bridge(params, 1, h)); };
    auto report = ts::check_gradients(
        {{"b1.w", params.domains[0].bridge1.w},
         {"b1.b", params.domains[0].bridge1.b},
         {"b2.w", params.domains[0].bridge2.w},
         {"b2.b", params.domains[0].bridge2.b}},
        fwd, 0, 5);
    CHECK(report.ok());
}

TEST_CASE("model forward passes a sampled finite-difference smoke check") {
    ModelParams params = ModelParams::init(tiny_hp(4, 12), 81);
    const std::vector<int> framed = frame_of({4, 5, 6});
    auto fwd = [&] {
        ContentCode c = encode_content(params, 1, framed);
        StyleCode s = encode_style(params, 1, framed);
        FusedCode z = compose(c, s);
        DecoderTrace trace = decoder_forward(params, 1, z, {kBos, 4, 5});
        return mean_all(log_softmax(trace.logits));
    };
    DomainParams& dom = params.domains[0];
    auto report = ts::check_gradients({{"emb", dom.embedding},
                                       {"content0.w", dom.content_convs[0].w},
                                       {"style2.w", dom.style_convs[2].w},
                                       {"style_mlp2.w", dom.style_mlp2.w},
                                       {"dec1.w", dom.decoder_convs[1].w},
                                       {"attn1.w", dom.decoder_attn[1].w},
                                       {"out.w", dom.out_proj.w}},
                                      fwd, 6, 17);
    INFO("max rel err ", report.max_rel_error);
    CHECK(report.ok());
}

TEST_CASE("checkpoints round-trip bitwise and reject corruption") {
    const fs::path dir = fs::temp_directory_path() / "polystyle_model_test";
    fs::create_directories(dir);
    const std::string path = (dir / "model.ckpt").string();

    ModelParams params = ModelParams::init(tiny_hp(6, 18), 91);
    params.vocab_hash = 0xabcdef;
    params.trained = true;
    save_checkpoint(params, path);
    ModelParams loaded = load_checkpoint(path);
    CHECK(loaded.trained);
    CHECK(loaded.vocab_hash == 0xabcdef);
    CHECK(loaded.hp == params.hp);

    const std::vector<int> framed = frame_of({4, 5, 6, 7});
    ContentCode a = encode_content(params, 1, framed);
    ContentCode b = encode_content(loaded, 1, framed);
    CHECK(a.values.data() == b.values.data());

    // Saving the loaded params reproduces the file byte for byte.
    const std::string path2 = (dir / "model2.ckpt").string();
    save_checkpoint(loaded, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), {});
    std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);

    SUBCASE("wrong magic") {
        std::string bad = s1;
        bad[0] = 'X';
        std::ofstream(path2, std::ios::binary).write(bad.data(), static_cast<std::streamsize>(bad.size()));
        CHECK_THROWS_WITH_AS(load_checkpoint(path2), doctest::Contains("magic"),
                             std::runtime_error);
    }
    SUBCASE("truncated file") {
        std::string bad = s1.substr(0, s1.size() / 2);
        std::ofstream(path2, std::ios::binary).write(bad.data(), static_cast<std::streamsize>(bad.size()));
        CHECK_THROWS_WITH_AS(load_checkpoint(path2), doctest::Contains("checksum"),
                             std::runtime_error);
    }
    SUBCASE("flipped payload byte") {
        std::string bad = s1;
        bad[bad.size() / 2] = static_cast<char>(bad[bad.size() / 2] ^ 0x5a);
        std::ofstream(path2, std::ios::binary).write(bad.data(), static_cast<std::streamsize>(bad.size()));
        CHECK_THROWS_WITH_AS(load_checkpoint(path2), doctest::Contains("checksum"),
                             std::runtime_error);
    }
    fs::remove_all(dir);
}
