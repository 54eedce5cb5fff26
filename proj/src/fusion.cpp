#include "evdrive/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evdrive {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Mat Mat::random_uniform(int rows, int cols, double lo, double hi, Rng& rng) {
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m.at(r, c) = rng.uniform(lo, hi);
    return m;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions disagree");
    Mat out(a.rows(), b.cols());
#pragma omp parallel for
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < b.cols(); ++c) {
            double acc = 0.0;
            for (int k = 0; k < a.cols(); ++k) acc += a.at(r, k) * b.at(k, c);
            out.at(r, c) = acc;
        }
    }
    return out;
}

Mat transpose(const Mat& m) {
    Mat out(m.cols(), m.rows());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out.at(c, r) = m.at(r, c);
    return out;
}

Mat add(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("add: shape mismatch");
    Mat out(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out.at(r, c) = a.at(r, c) + b.at(r, c);
    return out;
}

void softmax_rows(Mat& m) {
    for (int r = 0; r < m.rows(); ++r) {
        double mx = m.at(r, 0);
        for (int c = 1; c < m.cols(); ++c) mx = std::max(mx, m.at(r, c));
        double sum = 0.0;
        for (int c = 0; c < m.cols(); ++c) {
            double e = std::exp(m.at(r, c) - mx);
            m.at(r, c) = e;
            sum += e;
        }
        for (int c = 0; c < m.cols(); ++c) m.at(r, c) /= sum;
    }
}

std::vector<double> sinusoidal_pe(int pos, int d_model) {
    if (d_model <= 0 || d_model % 2 != 0) throw std::invalid_argument("sinusoidal_pe: d_model must be positive and even");
    std::vector<double> pe(static_cast<std::size_t>(d_model));
    for (int i = 0; i < d_model / 2; ++i) {
        double freq = std::pow(10000.0, -2.0 * i / d_model);
        pe[2 * i] = std::sin(pos * freq);
        pe[2 * i + 1] = std::cos(pos * freq);
    }
    return pe;
}

namespace {

// Shared body for the parallel and serial attention variants; `parallel`
// selects whether query rows are processed under OpenMP.
Mat attention_body(const Mat& q, const Mat& k, const Mat& v, bool parallel) {
    if (q.cols() != k.cols()) throw std::invalid_argument("attention: q/k width mismatch");
    if (k.rows() != v.rows()) throw std::invalid_argument("attention: k/v row mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    Mat out(q.rows(), v.cols());
    auto row_task = [&](int r) {
        std::vector<double> logits(static_cast<std::size_t>(k.rows()));
        double mx = -1e300;
        for (int j = 0; j < k.rows(); ++j) {
            double dot = 0.0;
            for (int c = 0; c < q.cols(); ++c) dot += q.at(r, c) * k.at(j, c);
            logits[j] = dot * scale;
            mx = std::max(mx, logits[j]);
        }
        double sum = 0.0;
        for (int j = 0; j < k.rows(); ++j) {
            logits[j] = std::exp(logits[j] - mx);
            sum += logits[j];
        }
        for (int c = 0; c < v.cols(); ++c) {
            double acc = 0.0;
            for (int j = 0; j < k.rows(); ++j) acc += logits[j] * v.at(j, c);
            out.at(r, c) = acc / sum;
        }
    };
    if (parallel) {
#pragma omp parallel for
        for (int r = 0; r < q.rows(); ++r) row_task(r);
    } else {
        for (int r = 0; r < q.rows(); ++r) row_task(r);
    }
    return out;
}

}  // namespace

Mat scaled_dot_attention(const Mat& q, const Mat& k, const Mat& v) {
    return attention_body(q, k, v, true);
}

AttentionWeights init_attention(int d_model, int heads, Rng& rng) {
    if (heads <= 0 || d_model % heads != 0) throw std::invalid_argument("init_attention: d_model must divide evenly into heads");
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_model));
    AttentionWeights w;
    w.d_model = d_model;
    w.heads = heads;
    w.wq = Mat::random_uniform(d_model, d_model, -bound, bound, rng);
    w.wk = Mat::random_uniform(d_model, d_model, -bound, bound, rng);
    w.wv = Mat::random_uniform(d_model, d_model, -bound, bound, rng);
    w.wo = Mat::random_uniform(d_model, d_model, -bound, bound, rng);
    return w;
}

namespace {

Mat slice_cols(const Mat& m, int first, int count) {
    Mat out(m.rows(), count);
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < count; ++c) out.at(r, c) = m.at(r, first + c);
    return out;
}

}  // namespace

Mat multi_head_attention(const Mat& s, const AttentionWeights& w) {
    if (s.cols() != w.d_model) throw std::invalid_argument("multi_head_attention: token width != d_model");
    const int dk = w.head_dim();
    Mat q = matmul(s, w.wq);
    Mat k = matmul(s, w.wk);
    Mat v = matmul(s, w.wv);
    Mat concat(s.rows(), w.d_model);
    for (int h = 0; h < w.heads; ++h) {
        Mat head = attention_body(slice_cols(q, h * dk, dk), slice_cols(k, h * dk, dk),
                                  slice_cols(v, h * dk, dk), true);
        for (int r = 0; r < head.rows(); ++r)
            for (int c = 0; c < dk; ++c) concat.at(r, h * dk + c) = head.at(r, c);
    }
    return matmul(concat, w.wo);
}

TokenSequence multi_head_attention(const TokenSequence& s, const AttentionWeights& w) {
    if (s.sources.size() != static_cast<std::size_t>(s.tokens.rows()))
        throw std::invalid_argument("multi_head_attention: source tags must match token count");
    return TokenSequence{multi_head_attention(s.tokens, w), s.sources};
}

Mat tokenize(const std::vector<double>& feature_map, int channels, int height, int width,
             const Mat& projection, const Mat& pe) {
    if (feature_map.size() != static_cast<std::size_t>(channels) * height * width)
        throw std::invalid_argument("tokenize: feature map size mismatch");
    if (projection.cols() != channels) throw std::invalid_argument("tokenize: projection width != channels");
    const int n = height * width;
    if (pe.rows() != n || pe.cols() != projection.rows())
        throw std::invalid_argument("tokenize: positional code shape mismatch");
    const int d = projection.rows();
    Mat out(n, d);
#pragma omp parallel for
    for (int t = 0; t < n; ++t) {
        const int y = t / width;
        const int x = t % width;
        for (int row = 0; row < d; ++row) {
            double acc = 0.0;
            for (int c = 0; c < channels; ++c)
                acc += projection.at(row, c) * feature_map[(static_cast<std::size_t>(c) * height + y) * width + x];
            out.at(t, row) = acc + pe.at(t, row);
        }
    }
    return out;
}

namespace {

Mat layer_norm(const Mat& x) {
    Mat out(x.rows(), x.cols());
    for (int r = 0; r < x.rows(); ++r) {
        double mean = 0.0;
        for (int c = 0; c < x.cols(); ++c) mean += x.at(r, c);
        mean /= x.cols();
        double var = 0.0;
        for (int c = 0; c < x.cols(); ++c) {
            double d = x.at(r, c) - mean;
            var += d * d;
        }
        var /= x.cols();
        const double inv = 1.0 / std::sqrt(var + 1e-5);
        for (int c = 0; c < x.cols(); ++c) out.at(r, c) = (x.at(r, c) - mean) * inv;
    }
    return out;
}

Mat ffn_forward(const EncoderLayer& layer, const Mat& x) {
    Mat hidden = matmul(x, layer.w1);
    for (int r = 0; r < hidden.rows(); ++r)
        for (int c = 0; c < hidden.cols(); ++c)
            hidden.at(r, c) = std::max(0.0, hidden.at(r, c) + layer.b1.at(0, c));
    Mat out = matmul(hidden, layer.w2);
    for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c) out.at(r, c) += layer.b2.at(0, c);
    return out;
}

}  // namespace

EncoderStack init_encoder(const FusionParams& params, std::uint64_t seed) {
    Rng rng(seed);
    const int d = params.d_model;
    const int hidden = params.ffn_mult * d;
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    EncoderStack stack;
    stack.d_model = d;
    stack.layers.reserve(static_cast<std::size_t>(params.n_layers));
    for (int i = 0; i < params.n_layers; ++i) {
        EncoderLayer layer;
        layer.attn = init_attention(d, params.n_heads, rng);
        layer.w1 = Mat::random_uniform(d, hidden, -bound, bound, rng);
        layer.b1 = Mat(1, hidden);
        layer.w2 = Mat::random_uniform(hidden, d, -bound, bound, rng);
        layer.b2 = Mat(1, d);
        stack.layers.push_back(std::move(layer));
    }
    return stack;
}

Mat encoder_forward(const EncoderStack& stack, Mat x) {
    if (x.cols() != stack.d_model) throw std::invalid_argument("encoder_forward: token width != d_model");
    for (const EncoderLayer& layer : stack.layers) {
        x = add(x, multi_head_attention(layer_norm(x), layer.attn));
        x = add(x, ffn_forward(layer, layer_norm(x)));
    }
    return x;
}

void copy_weights(const EncoderStack& src, EncoderStack& dst) {
    if (src.d_model != dst.d_model || src.layers.size() != dst.layers.size())
        throw std::invalid_argument("copy_weights: stacks have different architecture");
    dst = src;
}

namespace {

bool mat_equal(const Mat& a, const Mat& b) {
    return a.same_shape(b) && a.raw() == b.raw();
}

}  // namespace

bool weights_equal(const EncoderStack& a, const EncoderStack& b) {
    if (a.d_model != b.d_model || a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const EncoderLayer& la = a.layers[i];
        const EncoderLayer& lb = b.layers[i];
        if (la.attn.heads != lb.attn.heads) return false;
        if (!mat_equal(la.attn.wq, lb.attn.wq) || !mat_equal(la.attn.wk, lb.attn.wk) ||
            !mat_equal(la.attn.wv, lb.attn.wv) || !mat_equal(la.attn.wo, lb.attn.wo))
            return false;
        if (!mat_equal(la.w1, lb.w1) || !mat_equal(la.b1, lb.b1) || !mat_equal(la.w2, lb.w2) ||
            !mat_equal(la.b2, lb.b2))
            return false;
    }
    return true;
}

std::vector<double> stub_backbone_features(TokenSource source, int channels, int height,
                                           int width, std::uint64_t seed) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(source) + 1));
    std::vector<double> feat(static_cast<std::size_t>(channels) * height * width);
    for (double& v : feat) v = rng.uniform(-1.0, 1.0);
    return feat;
}

}  // namespace evdrive
