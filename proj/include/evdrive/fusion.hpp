#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/rng.hpp"

namespace evdrive {

// Dense row-major matrix of doubles; just enough linear algebra for the
// attention kernels, kept hand-rolled so the kernels stay self-contained
// and bit-reproducible.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<double>& raw() const { return data_; }

    static Mat identity(int n);
    static Mat random_uniform(int rows, int cols, double lo, double hi, Rng& rng);

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Mat matmul(const Mat& a, const Mat& b);      // parallel over output rows
Mat transpose(const Mat& m);
Mat add(const Mat& a, const Mat& b);

// Numerically stable in-place row softmax (max subtraction).
void softmax_rows(Mat& m);

// Interleaved sin/cos positional code: dim 2i is sin(pos / 10000^(2i/d)),
// dim 2i+1 the matching cos. d_model must be even.
std::vector<double> sinusoidal_pe(int pos, int d_model);

// softmax(Q K^T / sqrt(d_k)) V, parallel across query rows.
Mat scaled_dot_attention(const Mat& q, const Mat& k, const Mat& v);

// Per-sensor origin of a token; the kernels ignore it, but the sequence
// carries it through attention untouched.
enum class TokenSource : std::uint8_t {
    RgbFront,
    RgbLeft,
    RgbRight,
    RgbCenter,
    LidarBev,
    DvsFront,
    DvsLeft,
    DvsRight,
};

struct TokenSequence {
    Mat tokens;                          // N x D
    std::vector<TokenSource> sources;    // N entries
};

struct AttentionWeights {
    int d_model = 0;
    int heads = 0;
    Mat wq, wk, wv, wo;  // all d_model x d_model; heads slice the columns

    int head_dim() const { return d_model / heads; }
};

AttentionWeights init_attention(int d_model, int heads, Rng& rng);

Mat multi_head_attention(const Mat& s, const AttentionWeights& w);
TokenSequence multi_head_attention(const TokenSequence& s, const AttentionWeights& w);

// Flattens a C x H x W feature map into H*W tokens in row-major order:
// token(y, x) = projection * feature[:, y, x] + pe[y * W + x].
// `projection` is D x C, `pe` is (H*W) x D.
Mat tokenize(const std::vector<double>& feature_map, int channels, int height, int width,
             const Mat& projection, const Mat& pe);

// Pre-norm transformer encoder layer: x += MHA(LN(x)); x += FFN(LN(x)),
// with a ReLU MLP expanding to ffn_mult * d_model. LayerNorm carries no
// learned scale/offset.
struct EncoderLayer {
    AttentionWeights attn;
    Mat w1, b1;  // d_model -> hidden
    Mat w2, b2;  // hidden -> d_model
};

struct EncoderStack {
    int d_model = 0;
    std::vector<EncoderLayer> layers;
};

// Seed-deterministic init, uniform(-1/sqrt(D), 1/sqrt(D)).
EncoderStack init_encoder(const FusionParams& params, std::uint64_t seed);

Mat encoder_forward(const EncoderStack& stack, Mat x);

// Cross-modal weight transfer: overwrite dst's weights with src's.
void copy_weights(const EncoderStack& src, EncoderStack& dst);
bool weights_equal(const EncoderStack& a, const EncoderStack& b);

// Seeded stand-in for a sensor backbone: produces a deterministic C x H x W
// feature map for the self-test plumbing.
std::vector<double> stub_backbone_features(TokenSource source, int channels, int height,
                                           int width, std::uint64_t seed);

namespace serial {
// Naive single-threaded references for the parallel kernels above.
Mat matmul(const Mat& a, const Mat& b);
Mat scaled_dot_attention(const Mat& q, const Mat& k, const Mat& v);
}  // namespace serial

}  // namespace evdrive
