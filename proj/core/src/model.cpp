#include "polystyle/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "polystyle/corpus.hpp"

namespace polystyle {

namespace {

constexpr double kResidualScale = 0.70710678118654752440;  // sqrt(0.5)

void check_domain(int domain) {
    if (domain != 1 && domain != 2) {
        throw std::invalid_argument("model: domain must be 1 or 2, got " + std::to_string(domain));
    }
}

void check_tokens(const ModelParams& params, const std::vector<int>& tokens) {
    if (tokens.empty()) throw std::invalid_argument("model: empty token sequence");
    const int frame_cap = params.hp.max_len + 2;  // BOS + tokens + EOS
    if (static_cast<int>(tokens.size()) > frame_cap) {
        throw std::invalid_argument("model: sequence of " + std::to_string(tokens.size()) +
                                    " tokens exceeds framed max length " +
                                    std::to_string(frame_cap));
    }
}

}  // namespace

void Hyperparams::validate() const {
    if (d < 1) throw std::invalid_argument("hyperparams: d must be >= 1");
    if (vocab_size < 5) throw std::invalid_argument("hyperparams: vocab_size must cover specials");
    if (max_len < 1) throw std::invalid_argument("hyperparams: max_len must be >= 1");
    if (kernel < 1 || kernel % 2 == 0) {
        throw std::invalid_argument("hyperparams: kernel must be odd and >= 1");
    }
    if (content_layers < 3 || style_layers < 2 || decoder_layers < 2) {
        throw std::invalid_argument("hyperparams: too few layers");
    }
}

// ---- init -----------------------------------------------------------------------

namespace {

ConvLayer init_conv(int c_out, int k, int c_in, std::mt19937_64& rng) {
    ConvLayer l;
    l.w = init_uniform({c_out, k, c_in}, k * c_in, rng);
    l.b = init_uniform({c_out}, k * c_in, rng);
    return l;
}

LinearLayer init_linear(int in, int out, std::mt19937_64& rng) {
    LinearLayer l;
    l.w = init_uniform({in, out}, in, rng);
    l.b = init_uniform({out}, in, rng);
    return l;
}

}  // namespace

ModelParams ModelParams::init(const Hyperparams& hp, uint64_t seed) {
    hp.validate();
    ModelParams p;
    p.hp = hp;
    p.init_seed = seed;
    std::mt19937_64 rng(seed);
    const int d = hp.d, k = hp.kernel, v = hp.vocab_size;
    for (DomainParams& dom : p.domains) {
        dom.embedding = init_uniform({v, d}, d, rng);
        for (int i = 0; i < hp.content_layers; ++i) dom.content_convs.push_back(init_conv(2 * d, k, d, rng));
        for (int i = 0; i < hp.style_layers; ++i) dom.style_convs.push_back(init_conv(2 * d, k, d, rng));
        dom.style_mlp1 = init_linear(d, d, rng);
        dom.style_mlp2 = init_linear(d, 2 * d, rng);
        for (int i = 0; i < hp.decoder_layers; ++i) {
            dom.decoder_convs.push_back(init_conv(2 * d, k, d, rng));
            dom.decoder_attn.push_back(init_linear(d, d, rng));
        }
        dom.out_proj = init_linear(d, v, rng);
        for (int i = 0; i < 2; ++i) dom.disc_convs.push_back(init_conv(d, k, d, rng));
        dom.disc_out = init_linear(d, 1, rng);
        dom.bridge1 = init_linear(d, d, rng);
        dom.bridge2 = init_linear(d, d, rng);
    }
    p.classifier1 = init_linear(2 * d, d, rng);
    p.classifier2 = init_linear(d, 2, rng);
    return p;
}

// ---- registries -------------------------------------------------------------------

namespace {

void push_conv(std::vector<NamedParam>& out, const std::string& base, const ConvLayer& l) {
    out.push_back({base + ".w", l.w});
    out.push_back({base + ".b", l.b});
}

void push_linear(std::vector<NamedParam>& out, const std::string& base, const LinearLayer& l) {
    out.push_back({base + ".w", l.w});
    out.push_back({base + ".b", l.b});
}

void collect_generator(ModelParams& p, std::vector<NamedParam>& out) {
    for (int di = 0; di < 2; ++di) {
        DomainParams& dom = p.domains[di];
        const std::string d = "domain" + std::to_string(di + 1);
        out.push_back({d + ".embedding", dom.embedding});
        for (size_t i = 0; i < dom.content_convs.size(); ++i) {
            push_conv(out, d + ".content_conv" + std::to_string(i), dom.content_convs[i]);
        }
        for (size_t i = 0; i < dom.style_convs.size(); ++i) {
            push_conv(out, d + ".style_conv" + std::to_string(i), dom.style_convs[i]);
        }
        push_linear(out, d + ".style_mlp1", dom.style_mlp1);
        push_linear(out, d + ".style_mlp2", dom.style_mlp2);
        for (size_t i = 0; i < dom.decoder_convs.size(); ++i) {
            push_conv(out, d + ".decoder_conv" + std::to_string(i), dom.decoder_convs[i]);
            push_linear(out, d + ".decoder_attn" + std::to_string(i), dom.decoder_attn[i]);
        }
        push_linear(out, d + ".out_proj", dom.out_proj);
        push_linear(out, d + ".bridge1", dom.bridge1);
        push_linear(out, d + ".bridge2", dom.bridge2);
    }
    push_linear(out, "classifier1", p.classifier1);
    push_linear(out, "classifier2", p.classifier2);
}

void collect_discriminator(ModelParams& p, std::vector<NamedParam>& out) {
    for (int di = 0; di < 2; ++di) {
        DomainParams& dom = p.domains[di];
        const std::string d = "domain" + std::to_string(di + 1);
        for (size_t i = 0; i < dom.disc_convs.size(); ++i) {
            push_conv(out, d + ".disc_conv" + std::to_string(i), dom.disc_convs[i]);
        }
        push_linear(out, d + ".disc_out", dom.disc_out);
    }
}

}  // namespace

std::vector<NamedParam> ModelParams::generator_params() {
    std::vector<NamedParam> out;
    collect_generator(*this, out);
    return out;
}

std::vector<NamedParam> ModelParams::discriminator_params() {
    std::vector<NamedParam> out;
    collect_discriminator(*this, out);
    return out;
}

std::vector<NamedParam> ModelParams::all_params() {
    std::vector<NamedParam> out;
    collect_generator(*this, out);
    collect_discriminator(*this, out);
    return out;
}

void ModelParams::zero_all_grads() {
    for (auto& p : all_params()) p.value.zero_grad();
}

std::vector<TensorNode*> ModelParams::freeze(std::vector<NamedParam>& group) {
    std::vector<TensorNode*> frozen;
    for (auto& p : group) {
        if (p.value.requires_grad()) {
            p.value.node()->requires_grad = false;
            frozen.push_back(p.value.node());
        }
    }
    return frozen;
}

void ModelParams::unfreeze(const std::vector<TensorNode*>& frozen) {
    for (TensorNode* n : frozen) n->requires_grad = true;
}

FreezeGuard::FreezeGuard(std::vector<NamedParam> group)
    : frozen_(ModelParams::freeze(group)) {}

FreezeGuard::~FreezeGuard() { ModelParams::unfreeze(frozen_); }

// ---- encoders ---------------------------------------------------------------------

namespace {

// Length-preserving GLU conv block with in-block pooling and scaled residual.
enum class Pool { Avg, Max };

Tensor encoder_block(const Tensor& x, const ConvLayer& conv, int kernel, Pool pool) {
    const int same = (kernel - 1) / 2;
    Tensor h = glu(conv1d(x, conv.w, conv.b, same, same));
    h = pool == Pool::Avg ? avg_pool1d(h, kernel) : max_pool1d(h, kernel);
    return scale(add(h, x), kResidualScale);
}

}  // namespace

ContentTrace encode_content_trace(const ModelParams& params, int domain,
                                  const std::vector<int>& tokens) {
    check_domain(domain);
    check_tokens(params, tokens);
    const DomainParams& dom = params.domains[domain - 1];
    Tensor h = embed(dom.embedding, tokens);
    ContentTrace trace;
    for (size_t i = 0; i < dom.content_convs.size(); ++i) {
        h = encoder_block(h, dom.content_convs[i], params.hp.kernel, Pool::Avg);
        if (i == 1) trace.hidden = h;
    }
    trace.code = h;
    return trace;
}

ContentCode encode_content(const ModelParams& params, int domain,
                           const std::vector<int>& tokens) {
    return ContentCode{encode_content_trace(params, domain, tokens).code};
}

Tensor encode_content_tail(const ModelParams& params, int domain, const Tensor& hidden) {
    check_domain(domain);
    const DomainParams& dom = params.domains[domain - 1];
    Tensor h = hidden;
    for (size_t i = 2; i < dom.content_convs.size(); ++i) {
        h = encoder_block(h, dom.content_convs[i], params.hp.kernel, Pool::Avg);
    }
    return h;
}

StyleCode encode_style(const ModelParams& params, int domain,
                       const std::vector<int>& tokens) {
    check_domain(domain);
    check_tokens(params, tokens);
    const DomainParams& dom = params.domains[domain - 1];
    Tensor h = embed(dom.embedding, tokens);
    for (const ConvLayer& conv : dom.style_convs) {
        h = encoder_block(h, conv, params.hp.kernel, Pool::Max);
    }
    Tensor pooled = mean_over_positions(h);  // global average pooling
    Tensor hidden = tanh(linear(pooled, dom.style_mlp1.w, dom.style_mlp1.b));
    Tensor head = linear(hidden, dom.style_mlp2.w, dom.style_mlp2.b);  // [2d]
    const int d = params.hp.d;
    StyleCode s;
    s.mu = slice_vec(head, 0, d);
    s.sigma = softplus(slice_vec(head, d, 2 * d));  // log-exponential, strictly positive
    return s;
}

// ---- composition --------------------------------------------------------------------

FusedCode compose(const ContentCode& content, const StyleCode& style) {
    const Tensor& c = content.values;
    if (c.rank() != 2 || style.mu.rank() != 1 || c.dim(1) != style.mu.dim(0) ||
        style.mu.dim(0) != style.sigma.dim(0)) {
        throw std::invalid_argument("compose: channel dimensions of content and style differ");
    }
    Tensor centered = row_sub(c, mean_over_positions(c));
    Tensor normalized = row_div(centered, std_over_positions(c));  // std carries the eps floor
    return FusedCode{row_add(row_mul(normalized, style.sigma), style.mu)};
}

// ---- decoder ----------------------------------------------------------------------

DecoderTrace decoder_forward(const ModelParams& params, int domain, const FusedCode& fused,
                             const std::vector<int>& prefix_tokens) {
    check_domain(domain);
    if (prefix_tokens.empty() || prefix_tokens.front() != kBos) {
        throw std::invalid_argument("decoder: prefix must begin with BOS");
    }
    const int decode_cap = params.hp.max_len + 2;
    if (static_cast<int>(prefix_tokens.size()) > decode_cap) {
        throw std::invalid_argument("decoder: prefix of " + std::to_string(prefix_tokens.size()) +
                                    " tokens exceeds max decode length " +
                                    std::to_string(decode_cap));
    }
    const DomainParams& dom = params.domains[domain - 1];
    const int k = params.hp.kernel;
    Tensor e = embed(dom.embedding, prefix_tokens);  // [t, d]
    Tensor h = e;
    DecoderTrace trace;
    const size_t n_blocks = dom.decoder_convs.size();
    for (size_t i = 0; i < n_blocks; ++i) {
        // Causal conv: pad k-1 on the left only.
        Tensor g = glu(conv1d(h, dom.decoder_convs[i].w, dom.decoder_convs[i].b, k - 1, 0));
        // Multi-step attention over the fused positions.
        Tensor q = add(linear(g, dom.decoder_attn[i].w, dom.decoder_attn[i].b), e);
        Tensor attn = softmax(matmul_nt(q, fused.values));  // [t, m]
        Tensor ctx = matmul(attn, fused.values);            // [t, d]
        Tensor merged = scale(add(g, ctx), kResidualScale);
        h = scale(add(merged, h), kResidualScale);
        if (i + 2 == n_blocks) trace.second_last = h;
    }
    trace.logits = linear(h, dom.out_proj.w, dom.out_proj.b);
    return trace;
}

Tensor decode_step(const ModelParams& params, int domain, const FusedCode& fused,
                   const std::vector<int>& prefix_tokens) {
    DecoderTrace trace = decoder_forward(params, domain, fused, prefix_tokens);
    const int t = trace.logits.dim(0);
    Tensor probs = softmax(slice_rows(trace.logits, t - 1, t));
    return reshape(probs, {probs.dim(1)});
}

// ---- discriminator / classifier / bridge ----------------------------------------------

Tensor discriminate(const ModelParams& params, int domain, const FusedCode& z) {
    check_domain(domain);
    const DomainParams& dom = params.domains[domain - 1];
    const int same = (params.hp.kernel - 1) / 2;
    Tensor h = z.values;
    for (const ConvLayer& conv : dom.disc_convs) {
        h = tanh(conv1d(h, conv.w, conv.b, same, same));
    }
    Tensor pooled = mean_over_positions(h);
    return sigmoid(linear(pooled, dom.disc_out.w, dom.disc_out.b));
}

Tensor classify_style(const ModelParams& params, const StyleCode& style) {
    Tensor joint = concat({style.mu, style.sigma}, 0);  // [2d]
    Tensor h = tanh(linear(joint, params.classifier1.w, params.classifier1.b));
    return softmax(linear(h, params.classifier2.w, params.classifier2.b));
}

Tensor bridge(const ModelParams& params, int direction, const Tensor& decoder_hidden) {
    check_domain(direction);
    const DomainParams& dom = params.domains[direction - 1];
    Tensor h = tanh(linear(decoder_hidden, dom.bridge1.w, dom.bridge1.b));
    return linear(h, dom.bridge2.w, dom.bridge2.b);
}

// ---- checkpoint --------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'T', 'Y', 'F'};
constexpr uint32_t kVersion = 1;

void put_bytes(std::string& buf, const void* p, size_t n) {
    buf.append(static_cast<const char*>(p), n);
}

template <typename T>
void put(std::string& buf, T v) {
    put_bytes(buf, &v, sizeof(T));
}

class Reader {
public:
    Reader(const std::string& buf, size_t end) : buf_(buf), end_(end) {}
    void read(void* p, size_t n) {
        if (pos_ + n > end_) throw std::runtime_error("checkpoint: truncated payload");
        std::memcpy(p, buf_.data() + pos_, n);
        pos_ += n;
    }
    template <typename T>
    T get() {
        T v;
        read(&v, sizeof(T));
        return v;
    }
    size_t pos() const { return pos_; }

private:
    const std::string& buf_;
    size_t end_;
    size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
    std::string buf;
    put_bytes(buf, kMagic, 4);
    put<uint32_t>(buf, kVersion);
    put<int32_t>(buf, params.hp.d);
    put<int32_t>(buf, params.hp.vocab_size);
    put<int32_t>(buf, params.hp.max_len);
    put<int32_t>(buf, params.hp.kernel);
    put<int32_t>(buf, params.hp.content_layers);
    put<int32_t>(buf, params.hp.style_layers);
    put<int32_t>(buf, params.hp.decoder_layers);
    put<uint64_t>(buf, params.init_seed);
    put<uint64_t>(buf, params.vocab_hash);
    put<uint8_t>(buf, params.trained ? 1 : 0);

    auto all = const_cast<ModelParams&>(params).all_params();
    put<uint32_t>(buf, static_cast<uint32_t>(all.size()));
    for (const auto& p : all) {
        const auto& shape = p.value.shape();
        put<uint32_t>(buf, static_cast<uint32_t>(shape.size()));
        for (int d : shape) put<int32_t>(buf, d);
        put<uint64_t>(buf, p.value.data().size());
        put_bytes(buf, p.value.data().data(), p.value.data().size() * sizeof(double));
    }
    put<uint64_t>(buf, fnv1a64(buf.data(), buf.size()));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot write " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("checkpoint: write failed for " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot read " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (buf.size() < 4 + sizeof(uint32_t) + sizeof(uint64_t)) {
        throw std::runtime_error("checkpoint: checksum mismatch (file truncated)");
    }
    if (std::memcmp(buf.data(), kMagic, 4) != 0) {
        throw std::runtime_error("checkpoint: bad magic bytes, not a model checkpoint");
    }
    const size_t body = buf.size() - sizeof(uint64_t);
    uint64_t stored;
    std::memcpy(&stored, buf.data() + body, sizeof(uint64_t));
    if (stored != fnv1a64(buf.data(), body)) {
        throw std::runtime_error("checkpoint: checksum mismatch (file corrupt or truncated)");
    }

    Reader r(buf, body);
    char magic[4];
    r.read(magic, 4);
    const uint32_t version = r.get<uint32_t>();
    if (version != kVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version) +
                                 ", expected " + std::to_string(kVersion));
    }
    Hyperparams hp;
    hp.d = r.get<int32_t>();
    hp.vocab_size = r.get<int32_t>();
    hp.max_len = r.get<int32_t>();
    hp.kernel = r.get<int32_t>();
    hp.content_layers = r.get<int32_t>();
    hp.style_layers = r.get<int32_t>();
    hp.decoder_layers = r.get<int32_t>();
    const uint64_t init_seed = r.get<uint64_t>();
    const uint64_t vocab_hash = r.get<uint64_t>();
    const bool trained = r.get<uint8_t>() != 0;

    ModelParams params = ModelParams::init(hp, init_seed);
    params.vocab_hash = vocab_hash;
    params.trained = trained;

    auto all = params.all_params();
    const uint32_t count = r.get<uint32_t>();
    if (count != all.size()) {
        throw std::runtime_error("checkpoint: parameter count mismatch");
    }
    for (auto& p : all) {
        const uint32_t rank = r.get<uint32_t>();
        std::vector<int> shape(rank);
        for (uint32_t i = 0; i < rank; ++i) shape[i] = r.get<int32_t>();
        if (shape != p.value.shape()) {
            throw std::runtime_error("checkpoint: shape mismatch for parameter '" + p.name + "'");
        }
        const uint64_t n = r.get<uint64_t>();
        if (n != p.value.data().size()) {
            throw std::runtime_error("checkpoint: size mismatch for parameter '" + p.name + "'");
        }
        r.read(p.value.data().data(), n * sizeof(double));
    }
    return params;
}

}  // namespace polystyle
