#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lcaudit/data_model.hpp"
#include "lcaudit/samples.hpp"
#include "lcaudit/seed.hpp"

namespace lcaudit {

// Architecture and training schedule of the contrastive time-series encoder:
// `layers` causal convolutions (dilation 2^i, leaky ReLU), one causal output
// convolution to `out_channels` (dilation 2^layers), max-pooling over time and
// a linear projection to `latent_dim`.
struct EncoderConfig {
    int layers = 4;
    int channels = 16;
    int out_channels = 64;
    int latent_dim = 32;
    int kernel_size = 3;

    int steps = 500;
    int batch_size = 8;
    double learning_rate = 1e-3;
    int negatives = 10;
    int min_subseries = 48;   // shortest sampled subseries, in slots
    int max_subseries = 336;  // anchor length cap; 0 means the full series
    std::uint64_t seed = 0;

    // 10 layers x 40 channels, 320 output channels, latent 160, 10k steps of
    // batch 128 at learning rate 1e-4; full-length anchors.
    static EncoderConfig full_size();

    void check() const;  // throws DomainError on invalid values

    friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

inline constexpr double kLeakySlope = 0.01;

// All trainable weights in one flat vector; typed views by block.
class EncoderParams {
public:
    explicit EncoderParams(const EncoderConfig& cfg);  // all zeros

    const EncoderConfig& config() const { return cfg_; }
    int n_blocks() const { return cfg_.layers + 1; }  // conv layers + output conv
    int in_channels(int block) const { return block == 0 ? 1 : cfg_.channels; }
    int out_channels(int block) const { return block == cfg_.layers ? cfg_.out_channels : cfg_.channels; }
    int dilation(int block) const { return 1 << block; }

    using ConstMap = Eigen::Map<const Matrix>;
    using MutMap = Eigen::Map<Matrix>;
    using ConstVecMap = Eigen::Map<const Vector>;

    // Tap k multiplies the input delayed by (kernel_size - 1 - k) * dilation.
    ConstMap weight(int block, int tap) const;
    ConstVecMap bias(int block) const;
    ConstMap projection() const;  // latent_dim x out_channels
    ConstVecMap projection_bias() const;

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    // Offsets into values(), exposed for gradient views with the same layout.
    std::size_t weight_offset(int block, int tap) const;
    std::size_t bias_offset(int block) const;
    std::size_t projection_offset() const { return proj_offset_; }
    std::size_t projection_bias_offset() const { return proj_offset_ + static_cast<std::size_t>(cfg_.latent_dim) * cfg_.out_channels; }

    friend bool operator==(const EncoderParams& a, const EncoderParams& b) {
        return a.cfg_ == b.cfg_ && a.values_ == b.values_;
    }

private:
    EncoderConfig cfg_;
    std::vector<double> values_;
    std::vector<std::size_t> block_offset_;
    std::size_t proj_offset_ = 0;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
EncoderParams init_params(const EncoderConfig& cfg, std::uint64_t seed);

// Output-convolution activations before pooling (out_channels x T). Column t
// depends only on x[0..t].
Matrix encoder_features(const EncoderParams& p, std::span<const double> x);

// Embedding of a series of any length >= 1.
Vector encode(const EncoderParams& p, std::span<const double> x);
SampleMatrix encode_all(const EncoderParams& p, std::span<const std::vector<double>> series);

struct Triplet {
    std::vector<double> anchor;
    std::vector<double> positive;
    std::vector<std::vector<double>> negatives;
};

// -log s(<a,p>) - sum_k log s(-<a,n_k>) on embeddings, s the logistic function.
double triplet_loss_from_embeddings(const Vector& anchor, const Vector& positive, std::span<const Vector> negatives);
double triplet_loss(const EncoderParams& p, const Triplet& t);

struct LossAndGradient {
    double loss = 0.0;          // summed over the batch
    std::vector<double> grad;   // same layout as EncoderParams::values()
};

// Exact gradient of the summed triplet loss by backpropagation.
LossAndGradient loss_and_gradient(const EncoderParams& p, std::span<const Triplet> batch);
double batch_loss(const EncoderParams& p, std::span<const Triplet> batch);

// Random triplets: the anchor is a random subseries of a random series, the
// positive a random subseries of the anchor, the negatives subseries of other
// series with the positive's length.
std::vector<Triplet> sample_triplets(std::span<const std::vector<double>> series, const EncoderConfig& cfg,
                                     int count, Rng& rng);

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) on the mean triplet loss of each
// batch, for cfg.steps updates. Deterministic in cfg.seed.
EncoderParams train_encoder(std::span<const std::vector<double>> series, const EncoderConfig& cfg);
EncoderParams train_encoder(const AlignedDataset& ds, const EncoderConfig& cfg);

void save_encoder(const EncoderParams& p, const std::filesystem::path& path);
EncoderParams load_encoder(const std::filesystem::path& path);

}  // namespace lcaudit
