#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lcaudit/encoder.hpp"
#include "lcaudit/errors.hpp"
#include "support/fixtures.hpp"

using namespace lcaudit;
using namespace lcaudit::testing;

namespace {

EncoderConfig toy_config(int layers = 2) {
    EncoderConfig c;
    c.layers = layers;
    c.channels = 4;
    c.out_channels = 6;
    c.latent_dim = 3;
    c.kernel_size = 3;
    c.steps = 0;
    c.batch_size = 2;
    c.negatives = 2;
    c.min_subseries = 8;
    c.max_subseries = 40;
    return c;
}

double leaky_ref(double z) { return z > 0.0 ? z : kLeakySlope * z; }

// Straightforward per-output-sample convolution, independent of the GEMM path.
Vector direct_encode(const EncoderParams& p, const std::vector<double>& x) {
    const auto& cfg = p.config();
    const int t_len = static_cast<int>(x.size());
    std::vector<std::vector<double>> h{x};
    for (int b = 0; b < p.n_blocks(); ++b) {
        const int cout = p.out_channels(b), cin = p.in_channels(b), d = p.dilation(b);
        std::vector<std::vector<double>> next(static_cast<std::size_t>(cout), std::vector<double>(t_len));
        for (int c = 0; c < cout; ++c) {
            for (int t = 0; t < t_len; ++t) {
                double z = p.bias(b)(c);
                for (int k = 0; k < cfg.kernel_size; ++k) {
                    const int src = t - (cfg.kernel_size - 1 - k) * d;
                    if (src < 0) continue;
                    for (int ci = 0; ci < cin; ++ci) z += p.weight(b, k)(c, ci) * h[ci][src];
                }
                next[c][t] = leaky_ref(z);
            }
        }
        h = std::move(next);
    }
    Vector pooled(static_cast<Eigen::Index>(h.size()));
    for (std::size_t c = 0; c < h.size(); ++c) pooled[c] = *std::max_element(h[c].begin(), h[c].end());
    return p.projection() * pooled + p.projection_bias();
}

double log_sigmoid(double x) { return -std::log1p(std::exp(-x)); }

std::vector<Triplet> random_batch(const EncoderConfig& cfg, std::uint64_t seed, int count) {
    Rng rng(seed);
    std::vector<std::vector<double>> series;
    for (int i = 0; i < 4; ++i) series.push_back(gaussian_series(48, rng));
    return sample_triplets(series, cfg, count, rng);
}

}  // namespace

TEST(Encoder, ConfigChecks) {
    EXPECT_NO_THROW(EncoderConfig{}.check());
    EXPECT_NO_THROW(EncoderConfig::full_size().check());
    auto c = EncoderConfig{};
    c.latent_dim = 1;
    EXPECT_THROW(c.check(), DomainError);
    c = EncoderConfig{};
    c.layers = 0;
    EXPECT_THROW(c.check(), DomainError);
}

TEST(Encoder, ZeroParamsZeroSeriesGiveZero) {
    const EncoderParams p(toy_config(3));
    const std::vector<double> x(50, 0.0);
    EXPECT_EQ(encode(p, x), Vector::Zero(3));
}

TEST(Encoder, MatchesDirectConvolution) {
    const auto p = init_params(toy_config(3), 99);
    std::vector<double> ramp(60);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.05 * static_cast<double>(i) - 1.0;
    const Vector got = encode(p, ramp);
    const Vector want = direct_encode(p, ramp);
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Encoder, AnyLengthGivesLatentDim) {
    const auto p = init_params(toy_config(), 1);
    for (std::size_t n : {1u, 5u, 300u}) EXPECT_EQ(encode(p, std::vector<double>(n, 0.3)).size(), 3);
    EXPECT_THROW(encode(p, std::vector<double>{}), DomainError);
}

TEST(Encoder, Causal) {
    const auto p = init_params(toy_config(3), 5);
    Rng rng(6);
    const auto x = gaussian_series(80, rng);
    const Matrix base = encoder_features(p, x);
    for (int t0 : {0, 17, 40, 79}) {
        auto y = x;
        y[t0] += 3.0;
        const Matrix pert = encoder_features(p, y);
        EXPECT_EQ(pert.leftCols(t0), base.leftCols(t0)) << "t0=" << t0;
        EXPECT_NE(pert.col(t0), base.col(t0));
    }
}

TEST(TripletLoss, OrthogonalEmbeddings) {
    const Vector a = (Vector(2) << 1.0, 0.0).finished();
    const Vector pos = (Vector(2) << 0.0, 2.0).finished();
    const std::vector<Vector> negs(4, (Vector(2) << 0.0, -1.0).finished());
    EXPECT_NEAR(triplet_loss_from_embeddings(a, pos, negs), 5.0 * std::numbers::ln2, 1e-15);
}

TEST(TripletLoss, ConfidentLimitIsZero) {
    const Vector a = (Vector(2) << 100.0, 0.0).finished();
    const Vector pos = (Vector(2) << 100.0, 0.0).finished();
    const std::vector<Vector> negs{(Vector(2) << -100.0, 0.0).finished()};
    EXPECT_LT(triplet_loss_from_embeddings(a, pos, negs), 1e-300);
    EXPECT_GE(triplet_loss_from_embeddings(a, pos, negs), 0.0);
}

TEST(TripletLoss, TwoDimensionalClosedForm) {
    const Vector a = (Vector(2) << 1.0, 2.0).finished();
    const Vector pos = (Vector(2) << 0.5, -1.0).finished();
    const std::vector<Vector> negs{(Vector(2) << 2.0, 0.0).finished(), (Vector(2) << -1.0, 1.0).finished()};
    const double want = -log_sigmoid(1.0 * 0.5 - 2.0) - log_sigmoid(-2.0) - log_sigmoid(-1.0);
    EXPECT_NEAR(triplet_loss_from_embeddings(a, pos, negs), want, 1e-14);
}

TEST(Gradient, MatchesCentralDifferences) {
    const auto cfg = toy_config(2);
    const auto p = init_params(cfg, 2024);
    const auto batch = random_batch(cfg, 77, 3);
    const auto lg = loss_and_gradient(p, batch);
    EXPECT_NEAR(lg.loss, batch_loss(p, batch), 1e-12);

    Rng rng(31);
    const double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const std::size_t idx = rng() % p.size();
        EncoderParams plus = p, minus = p;
        plus.values()[idx] += h;
        minus.values()[idx] -= h;
        const double fd = (batch_loss(plus, batch) - batch_loss(minus, batch)) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(lg.grad[idx]), 1e-8});
        worst = std::max(worst, std::abs(fd - lg.grad[idx]) / denom);
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Gradient, PlateauIsFlat) {
    // One channel everywhere: the embedding is (c * max_t x_t, 0) for
    // positive series and tiny for negative ones, so a well-separated batch
    // sits on the zero-loss plateau.
    EncoderConfig cfg = toy_config(1);
    cfg.channels = 1;
    cfg.out_channels = 1;
    cfg.latent_dim = 2;
    cfg.kernel_size = 1;
    EncoderParams p(cfg);
    p.values()[p.weight_offset(0, 0)] = 1.0;
    p.values()[p.weight_offset(1, 0)] = 1.0;
    p.values()[p.projection_offset()] = 3000.0;
    Triplet t;
    t.anchor = std::vector<double>(10, 1.0);
    t.positive = std::vector<double>(5, 1.0);
    t.negatives = {std::vector<double>(5, -1.0)};
    const std::vector<Triplet> batch{t};
    const auto lg = loss_and_gradient(p, batch);
    EXPECT_LT(lg.loss, 1e-300);
    double norm = 0.0;
    for (double g : lg.grad) norm = std::max(norm, std::abs(g));
    EXPECT_LT(norm, 1e-300);
}

TEST(Gradient, SumsOverBatch) {
    const auto cfg = toy_config(2);
    const auto p = init_params(cfg, 8);
    const auto batch = random_batch(cfg, 9, 4);
    const auto whole = loss_and_gradient(p, batch);
    const auto first = loss_and_gradient(p, std::span(batch).first(2));
    const auto second = loss_and_gradient(p, std::span(batch).last(2));
    EXPECT_NEAR(whole.loss, first.loss + second.loss, 1e-12);
    for (std::size_t i = 0; i < whole.grad.size(); ++i) {
        EXPECT_NEAR(whole.grad[i], first.grad[i] + second.grad[i], 1e-12);
    }
}

TEST(Triplets, ShapesFollowConfig) {
    const auto cfg = toy_config();
    const auto batch = random_batch(cfg, 10, 20);
    ASSERT_EQ(batch.size(), 20u);
    for (const auto& t : batch) {
        EXPECT_GE(t.anchor.size(), static_cast<std::size_t>(cfg.min_subseries));
        EXPECT_LE(t.anchor.size(), static_cast<std::size_t>(cfg.max_subseries));
        EXPECT_LE(t.positive.size(), t.anchor.size());
        EXPECT_EQ(t.negatives.size(), static_cast<std::size_t>(cfg.negatives));
        for (const auto& n : t.negatives) EXPECT_EQ(n.size(), t.positive.size());
    }
}

TEST(Training, ZeroStepsReturnsInitialization) {
    auto cfg = toy_config();
    cfg.seed = 12;
    Rng rng(1);
    std::vector<std::vector<double>> series{gaussian_series(96, rng), gaussian_series(96, rng)};
    const auto trained = train_encoder(series, cfg);
    EXPECT_EQ(trained, init_params(cfg, derive_seed(cfg.seed, "init")));
}

TEST(Training, Deterministic) {
    auto cfg = toy_config();
    cfg.steps = 15;
    cfg.seed = 3;
    Rng rng(2);
    std::vector<std::vector<double>> series;
    for (int i = 0; i < 5; ++i) series.push_back(gaussian_series(96, rng));
    const auto a = train_encoder(series, cfg);
    const auto b = train_encoder(series, cfg);
    EXPECT_EQ(a, b);
    EXPECT_FALSE(a == init_params(cfg, derive_seed(cfg.seed, "init")));
}

TEST(Training, SeparatesSinusoidFamilies) {
    Rng rng(41);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi), amp(0.8, 1.2);
    auto family = [&](double period, int n) {
        std::vector<std::vector<double>> out;
        for (int i = 0; i < n; ++i) {
            const double ph = phase(rng), a = amp(rng);
            std::vector<double> x(192);
            for (std::size_t t = 0; t < x.size(); ++t) x[t] = a * std::sin(2.0 * std::numbers::pi * t / period + ph);
            out.push_back(std::move(x));
        }
        return out;
    };
    auto train = family(48.0, 15);
    const auto train_b = family(8.0, 15);
    train.insert(train.end(), train_b.begin(), train_b.end());
    auto test = family(48.0, 10);
    const auto test_b = family(8.0, 10);
    test.insert(test.end(), test_b.begin(), test_b.end());

    EncoderConfig cfg;
    cfg.layers = 2;
    cfg.channels = 8;
    cfg.out_channels = 16;
    cfg.latent_dim = 8;
    cfg.steps = 60;
    cfg.batch_size = 4;
    cfg.negatives = 2;
    cfg.min_subseries = 24;
    cfg.max_subseries = 96;
    cfg.learning_rate = 1e-2;
    cfg.seed = 5;
    const auto p = train_encoder(train, cfg);
    const SampleMatrix e_train = encode_all(p, train), e_test = encode_all(p, test);

    int correct = 0;
    for (Eigen::Index i = 0; i < e_test.rows(); ++i) {
        Eigen::Index best = 0;
        (e_train.rowwise() - e_test.row(i)).rowwise().squaredNorm().minCoeff(&best);
        correct += (best < 15) == (i < 10);
    }
    EXPECT_EQ(correct, 20);
}

TEST(Encoder, SaveLoadRoundTrip) {
    const auto dir = fresh_dir("encoder_io");
    const auto p = init_params(toy_config(), 77);
    save_encoder(p, dir / "enc.json");
    EXPECT_EQ(load_encoder(dir / "enc.json"), p);
}
