#include "lcaudit/encoder.hpp"

#include <cmath>

#include <json.hpp>

#include "lcaudit/errors.hpp"
#include "lcaudit/io.hpp"

namespace lcaudit {

EncoderConfig EncoderConfig::full_size() {
    EncoderConfig c;
    c.layers = 10;
    c.channels = 40;
    c.out_channels = 320;
    c.latent_dim = 160;
    c.kernel_size = 3;
    c.steps = 10000;
    c.batch_size = 128;
    c.learning_rate = 1e-4;
    c.max_subseries = 0;
    return c;
}

void EncoderConfig::check() const {
    auto fail = [](const char* what) { throw DomainError(std::string("EncoderConfig: ") + what); };
    if (layers < 1) fail("layers must be >= 1");
    if (layers > 24) fail("layers must be <= 24");
    if (channels < 1 || out_channels < 1) fail("channel counts must be >= 1");
    if (latent_dim < 2) fail("latent_dim must be >= 2");
    if (kernel_size < 1) fail("kernel_size must be >= 1");
    if (steps < 0) fail("steps must be >= 0");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
    if (negatives < 1) fail("negatives must be >= 1");
    if (min_subseries < 1) fail("min_subseries must be >= 1");
    if (max_subseries < 0) fail("max_subseries must be >= 0");
}

// ------------------------------------------------------------------ params

EncoderParams::EncoderParams(const EncoderConfig& cfg) : cfg_(cfg) {
    cfg_.check();
    std::size_t off = 0;
    for (int b = 0; b < n_blocks(); ++b) {
        block_offset_.push_back(off);
        off += static_cast<std::size_t>(cfg_.kernel_size) * out_channels(b) * in_channels(b) + out_channels(b);
    }
    proj_offset_ = off;
    off += static_cast<std::size_t>(cfg_.latent_dim) * cfg_.out_channels + cfg_.latent_dim;
    values_.assign(off, 0.0);
}

std::size_t EncoderParams::weight_offset(int block, int tap) const {
    return block_offset_.at(static_cast<std::size_t>(block)) +
           static_cast<std::size_t>(tap) * out_channels(block) * in_channels(block);
}

std::size_t EncoderParams::bias_offset(int block) const { return weight_offset(block, cfg_.kernel_size); }

EncoderParams::ConstMap EncoderParams::weight(int block, int tap) const {
    return ConstMap(values_.data() + weight_offset(block, tap), out_channels(block), in_channels(block));
}

EncoderParams::ConstVecMap EncoderParams::bias(int block) const {
    return ConstVecMap(values_.data() + bias_offset(block), out_channels(block));
}

EncoderParams::ConstMap EncoderParams::projection() const {
    return ConstMap(values_.data() + proj_offset_, cfg_.latent_dim, cfg_.out_channels);
}

EncoderParams::ConstVecMap EncoderParams::projection_bias() const {
    return ConstVecMap(values_.data() + projection_bias_offset(), cfg_.latent_dim);
}

EncoderParams init_params(const EncoderConfig& cfg, std::uint64_t seed) {
    EncoderParams p(cfg);
    Rng rng = make_rng(seed);
    auto fill = [&](std::size_t begin, std::size_t count, double fan_in) {
        std::uniform_real_distribution<double> u(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
        auto v = p.values();
        for (std::size_t i = begin; i < begin + count; ++i) v[i] = u(rng);
    };
    for (int b = 0; b < p.n_blocks(); ++b) {
        const double fan_in = static_cast<double>(p.in_channels(b)) * cfg.kernel_size;
        const std::size_t n_w = static_cast<std::size_t>(cfg.kernel_size) * p.out_channels(b) * p.in_channels(b);
        fill(p.weight_offset(b, 0), n_w + static_cast<std::size_t>(p.out_channels(b)), fan_in);
    }
    fill(p.projection_offset(), static_cast<std::size_t>(cfg.latent_dim) * (cfg.out_channels + 1), cfg.out_channels);
    return p;
}

// ----------------------------------------------------------------- forward

namespace {

double leaky(double z) { return z > 0.0 ? z : kLeakySlope * z; }
double leaky_slope(double z) { return z > 0.0 ? 1.0 : kLeakySlope; }

int shift_of(const EncoderParams& p, int block, int tap) {
    return (p.config().kernel_size - 1 - tap) * p.dilation(block);
}

Matrix causal_conv(const EncoderParams& p, int block, const Matrix& x) {
    const Eigen::Index t = x.cols();
    Matrix z = p.bias(block).replicate(1, t);
    for (int k = 0; k < p.config().kernel_size; ++k) {
        const Eigen::Index s = shift_of(p, block, k);
        if (s >= t) continue;
        z.rightCols(t - s).noalias() += p.weight(block, k) * x.leftCols(t - s);
    }
    return z;
}

struct Forward {
    std::vector<Matrix> inputs;  // input of each block
    std::vector<Matrix> pre;     // pre-activation of each block
    Matrix features;             // activation of the output block
    std::vector<Eigen::Index> argmax;
    Vector pooled;
    Vector embedding;
};

Forward forward(const EncoderParams& p, std::span<const double> x, bool keep_cache) {
    if (x.empty()) throw DomainError("encode: empty series");
    Forward f;
    Matrix h = Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (int b = 0; b < p.n_blocks(); ++b) {
        Matrix z = causal_conv(p, b, h);
        Matrix a = z.unaryExpr(&leaky);
        if (keep_cache) {
            f.inputs.push_back(std::move(h));
            f.pre.push_back(std::move(z));
        }
        h = std::move(a);
    }
    f.features = std::move(h);
    const Eigen::Index c = f.features.rows();
    f.pooled.resize(c);
    f.argmax.resize(static_cast<std::size_t>(c));
    for (Eigen::Index i = 0; i < c; ++i) {
        Eigen::Index arg = 0;
        f.pooled[i] = f.features.row(i).maxCoeff(&arg);
        f.argmax[static_cast<std::size_t>(i)] = arg;
    }
    f.embedding = p.projection() * f.pooled + p.projection_bias();
    return f;
}

// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(embedding).
void backward(const EncoderParams& p, const Forward& f, const Vector& d_embedding, std::vector<double>& grad) {
    const auto& cfg = p.config();
    Eigen::Map<Matrix> g_proj(grad.data() + p.projection_offset(), cfg.latent_dim, cfg.out_channels);
    Eigen::Map<Vector> g_proj_bias(grad.data() + p.projection_bias_offset(), cfg.latent_dim);
    g_proj.noalias() += d_embedding * f.pooled.transpose();
    g_proj_bias += d_embedding;
    const Vector d_pooled = p.projection().transpose() * d_embedding;

    const Eigen::Index t = f.features.cols();
    Matrix d_act = Matrix::Zero(f.features.rows(), t);
    for (Eigen::Index c = 0; c < d_act.rows(); ++c) d_act(c, f.argmax[static_cast<std::size_t>(c)]) = d_pooled[c];

    for (int b = p.n_blocks() - 1; b >= 0; --b) {
        const Matrix& z = f.pre[static_cast<std::size_t>(b)];
        const Matrix& x = f.inputs[static_cast<std::size_t>(b)];
        const Matrix d_z = d_act.cwiseProduct(z.unaryExpr(&leaky_slope));
        Eigen::Map<Vector> g_bias(grad.data() + p.bias_offset(b), p.out_channels(b));
        g_bias += d_z.rowwise().sum();
        Matrix d_x;
        if (b > 0) d_x = Matrix::Zero(x.rows(), t);
        for (int k = 0; k < cfg.kernel_size; ++k) {
            const Eigen::Index s = shift_of(p, b, k);
            if (s >= t) continue;
            Eigen::Map<Matrix> g_w(grad.data() + p.weight_offset(b, k), p.out_channels(b), p.in_channels(b));
            g_w.noalias() += d_z.rightCols(t - s) * x.leftCols(t - s).transpose();
            if (b > 0) d_x.leftCols(t - s).noalias() += p.weight(b, k).transpose() * d_z.rightCols(t - s);
        }
        d_act = std::move(d_x);
    }
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Matrix encoder_features(const EncoderParams& p, std::span<const double> x) { return forward(p, x, false).features; }

Vector encode(const EncoderParams& p, std::span<const double> x) { return forward(p, x, false).embedding; }

SampleMatrix encode_all(const EncoderParams& p, std::span<const std::vector<double>> series) {
    SampleMatrix out(static_cast<Eigen::Index>(series.size()), p.config().latent_dim);
    for (std::size_t i = 0; i < series.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = encode(p, series[i]).transpose();
    }
    return out;
}

// ------------------------------------------------------------------ loss

double triplet_loss_from_embeddings(const Vector& anchor, const Vector& positive, std::span<const Vector> negatives) {
    // -log s(u) = softplus(-u);  -log s(-u) = softplus(u)
    double loss = softplus(-anchor.dot(positive));
    for (const auto& n : negatives) loss += softplus(anchor.dot(n));
    return loss;
}

double triplet_loss(const EncoderParams& p, const Triplet& t) {
    std::vector<Vector> neg;
    neg.reserve(t.negatives.size());
    for (const auto& n : t.negatives) neg.push_back(encode(p, n));
    return triplet_loss_from_embeddings(encode(p, t.anchor), encode(p, t.positive), neg);
}

double batch_loss(const EncoderParams& p, std::span<const Triplet> batch) {
    double s = 0.0;
    for (const auto& t : batch) s += triplet_loss(p, t);
    return s;
}

LossAndGradient loss_and_gradient(const EncoderParams& p, std::span<const Triplet> batch) {
    LossAndGradient out;
    out.grad.assign(p.size(), 0.0);
    for (const auto& t : batch) {
        if (t.negatives.empty()) throw DomainError("triplet without negatives");
        const Forward fa = forward(p, t.anchor, true);
        const Forward fp = forward(p, t.positive, true);
        std::vector<Forward> fn;
        fn.reserve(t.negatives.size());
        for (const auto& n : t.negatives) fn.push_back(forward(p, n, true));

        const Vector& ea = fa.embedding;
        const double sp = ea.dot(fp.embedding);
        out.loss += softplus(-sp);
        const double wp = sigmoid(sp) - 1.0;  // d softplus(-u)/du
        Vector d_anchor = wp * fp.embedding;
        backward(p, fp, wp * ea, out.grad);
        for (const auto& f : fn) {
            const double sn = ea.dot(f.embedding);
            out.loss += softplus(sn);
            const double wn = sigmoid(sn);  // d softplus(u)/du
            d_anchor += wn * f.embedding;
            backward(p, f, wn * ea, out.grad);
        }
        backward(p, fa, d_anchor, out.grad);
    }
    return out;
}

// ---------------------------------------------------------------- training

std::vector<Triplet> sample_triplets(std::span<const std::vector<double>> series, const EncoderConfig& cfg, int count,
                                     Rng& rng) {
    if (series.empty()) throw DomainError("sample_triplets: no series");
    for (const auto& s : series) {
        if (s.empty()) throw DomainError("sample_triplets: empty series");
    }
    auto uniform = [&rng](std::size_t lo, std::size_t hi) {  // inclusive
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    auto slice = [](const std::vector<double>& s, std::size_t start, std::size_t len) {
        return std::vector<double>(s.begin() + static_cast<long>(start), s.begin() + static_cast<long>(start + len));
    };
    const std::size_t n = series.size();

    std::vector<Triplet> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) {
        const std::size_t i = uniform(0, n - 1);
        const auto& src = series[i];
        const std::size_t t = src.size();
        const std::size_t l_max = cfg.max_subseries > 0 ? std::min<std::size_t>(cfg.max_subseries, t) : t;
        const std::size_t l_min = std::min<std::size_t>(cfg.min_subseries, l_max);

        const std::size_t len_a = uniform(l_min, l_max);
        const std::size_t start_a = uniform(0, t - len_a);
        const std::size_t len_p = uniform(l_min, len_a);
        const std::size_t start_p = start_a + uniform(0, len_a - len_p);

        Triplet trip;
        trip.anchor = slice(src, start_a, len_a);
        trip.positive = slice(src, start_p, len_p);
        for (int k = 0; k < cfg.negatives; ++k) {
            std::size_t j = i;
            if (n > 1) {
                j = uniform(0, n - 2);
                if (j >= i) ++j;
            }
            const auto& other = series[j];
            const std::size_t len_n = std::min(len_p, other.size());
            trip.negatives.push_back(slice(other, uniform(0, other.size() - len_n), len_n));
        }
        out.push_back(std::move(trip));
    }
    return out;
}

EncoderParams train_encoder(std::span<const std::vector<double>> series, const EncoderConfig& cfg) {
    cfg.check();
    if (series.empty()) throw DomainError("train_encoder: empty training set");
    EncoderParams p = init_params(cfg, derive_seed(cfg.seed, "init"));
    Rng rng = make_rng(derive_seed(cfg.seed, "triplets"));

    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<double> m(p.size(), 0.0), v(p.size(), 0.0);
    double b1t = 1.0, b2t = 1.0;
    auto w = p.values();
    for (int step = 0; step < cfg.steps; ++step) {
        const auto batch = sample_triplets(series, cfg, cfg.batch_size, rng);
        const auto lg = loss_and_gradient(p, batch);
        b1t *= beta1;
        b2t *= beta2;
        const double scale = 1.0 / static_cast<double>(batch.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double g = lg.grad[i] * scale;
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            const double m_hat = m[i] / (1.0 - b1t);
            const double v_hat = v[i] / (1.0 - b2t);
            w[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
    return p;
}

EncoderParams train_encoder(const AlignedDataset& ds, const EncoderConfig& cfg) {
    std::vector<std::vector<double>> series;
    series.reserve(ds.size());
    for (const auto& c : ds.curves) series.push_back(c.values);
    return train_encoder(series, cfg);
}

// ------------------------------------------------------------ persistence

namespace {

constexpr const char* kEncoderFormat = "lcaudit-encoder";
constexpr int kEncoderVersion = 1;

}  // namespace

void save_encoder(const EncoderParams& p, const std::filesystem::path& path) {
    const auto& c = p.config();
    nlohmann::json j;
    j["format"] = kEncoderFormat;
    j["version"] = kEncoderVersion;
    j["config"] = {{"layers", c.layers},
                   {"channels", c.channels},
                   {"out_channels", c.out_channels},
                   {"latent_dim", c.latent_dim},
                   {"kernel_size", c.kernel_size},
                   {"steps", c.steps},
                   {"batch_size", c.batch_size},
                   {"learning_rate", c.learning_rate},
                   {"negatives", c.negatives},
                   {"min_subseries", c.min_subseries},
                   {"max_subseries", c.max_subseries},
                   {"seed", c.seed}};
    j["values"] = std::vector<double>(p.values().begin(), p.values().end());
    write_text_file(path, j.dump() + "\n");
}

EncoderParams load_encoder(const std::filesystem::path& path) {
    try {
        const auto j = nlohmann::json::parse(read_text_file(path));
        if (j.at("format").get<std::string>() != kEncoderFormat || j.at("version").get<int>() != kEncoderVersion) {
            throw SchemaError(path.string() + ": not a version-1 encoder file");
        }
        const auto& jc = j.at("config");
        EncoderConfig c;
        c.layers = jc.at("layers").get<int>();
        c.channels = jc.at("channels").get<int>();
        c.out_channels = jc.at("out_channels").get<int>();
        c.latent_dim = jc.at("latent_dim").get<int>();
        c.kernel_size = jc.at("kernel_size").get<int>();
        c.steps = jc.at("steps").get<int>();
        c.batch_size = jc.at("batch_size").get<int>();
        c.learning_rate = jc.at("learning_rate").get<double>();
        c.negatives = jc.at("negatives").get<int>();
        c.min_subseries = jc.at("min_subseries").get<int>();
        c.max_subseries = jc.at("max_subseries").get<int>();
        c.seed = jc.at("seed").get<std::uint64_t>();
        EncoderParams p(c);
        const auto values = j.at("values").get<std::vector<double>>();
        if (values.size() != p.size()) throw SchemaError(path.string() + ": parameter count does not match config");
        std::copy(values.begin(), values.end(), p.values().begin());
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

}  // namespace lcaudit
