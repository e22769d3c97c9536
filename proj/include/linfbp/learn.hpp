#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "linfbp/data.hpp"
#include "linfbp/geometry.hpp"
#include "linfbp/interp.hpp"
#include "linfbp/recon.hpp"
#include "linfbp/rng.hpp"
#include "linfbp/spectral.hpp"

namespace linfbp {

/// Raised when training produces a non-finite loss; the CLI maps it to its
/// numeric-failure exit code.
class numeric_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/**
 * Weights of the coefficient network: two 1-D convolutions over the
 * detector axis with a ReLU between them. conv1 maps 1 -> hidden channels,
 * conv2 maps hidden -> C channels; both are zero-padded to keep length N.
 * At the defaults (hidden 8, kernels 5) the whole model has 253 parameters
 * for C = 5 and 171 for C = 3.
 */
struct ModelParams {
    int hidden = 8;
    int k1 = 5;
    int k2 = 5;
    int out_channels = 5; // C

    std::vector<double> w1; // [q * k1 + d]
    std::vector<double> b1; // [q]
    std::vector<double> w2; // [(c * hidden + q) * k2 + d]
    std::vector<double> b2; // [c]

    std::size_t count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
};

inline ModelParams make_model(int hidden, int k1, int k2, int out_channels) {
    if (hidden < 1 || out_channels < 1)
        throw std::invalid_argument("make_model: channel counts must be positive");
    if (k1 < 1 || k2 < 1 || k1 % 2 == 0 || k2 % 2 == 0)
        throw std::invalid_argument("make_model: kernel sizes must be odd and positive");
    ModelParams p;
    p.hidden = hidden;
    p.k1 = k1;
    p.k2 = k2;
    p.out_channels = out_channels;
    p.w1.assign(static_cast<std::size_t>(hidden) * k1, 0.0);
    p.b1.assign(hidden, 0.0);
    p.w2.assign(static_cast<std::size_t>(out_channels) * hidden * k2, 0.0);
    p.b2.assign(out_channels, 0.0);
    return p;
}

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], drawn in storage order
/// (w1, b1, w2, b2) so a seed pins the whole initialization.
inline void init_fan_in(ModelParams& p, Rng& rng) {
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(p.k1));
    for (double& v : p.w1) v = rng.uniform(-bound1, bound1);
    for (double& v : p.b1) v = rng.uniform(-bound1, bound1);
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(p.hidden) * p.k2);
    for (double& v : p.w2) v = rng.uniform(-bound2, bound2);
    for (double& v : p.b2) v = rng.uniform(-bound2, bound2);
}

/**
 * Warm start at the configuration whose output coefficients make the
 * linear-family LCR reproduce plain linear interpolation of the filtered
 * view. conv1 becomes the identity pair (+x, -x) so the ReLU path is
 * exactly linear, and conv2 taps sample each cell's linear interpolant at
 * the hat anchors.
 *
 * gain scales the network OUTPUT (gain = 1 reproduces Li-FBP exactly;
 * gain < 1 leaves a coherent scale error for training to recover).
 * input_gain scales conv1 up and conv2 down by the same factor, which
 * leaves the output unchanged but makes the coefficients input_gain times
 * more sensitive to conv2 movement; under a normalized-step optimizer with
 * a fixed step budget this is what controls how fast the interpolant can
 * actually adapt.
 */
inline void init_linear_interp(ModelParams& p, const BasisSet& basis, double gain = 1.0,
                               double input_gain = 1.0) {
    if (basis.family != BasisFamily::linear)
        throw std::invalid_argument("init_linear_interp: requires the linear basis family");
    if (p.hidden < 2) throw std::invalid_argument("init_linear_interp: needs at least 2 hidden channels");
    if (p.out_channels != basis.count())
        throw std::invalid_argument("init_linear_interp: channel count does not match basis");
    if (!(input_gain > 0.0)) throw std::invalid_argument("init_linear_interp: input_gain must be > 0");
    std::fill(p.w1.begin(), p.w1.end(), 0.0);
    std::fill(p.b1.begin(), p.b1.end(), 0.0);
    std::fill(p.w2.begin(), p.w2.end(), 0.0);
    std::fill(p.b2.begin(), p.b2.end(), 0.0);
    const int mid1 = (p.k1 - 1) / 2;
    p.w1[0 * p.k1 + mid1] = input_gain;  // channel 0: +x
    p.w1[1 * p.k1 + mid1] = -input_gain; // channel 1: -x
    // remaining channels: rectified pairs of shifted copies; their conv2
    // taps start at zero so they do not change the output, but they give
    // the second layer live features to recruit instead of dead units
    for (int q = 2; q + 1 < p.hidden; q += 2) {
        const int pair = q / 2; // 1, 2, 3, ...
        const int shift = (pair % 2 == 1 ? 1 : -1) * ((pair + 1) / 2);
        const int tap = mid1 + shift;
        if (tap < 0 || tap >= p.k1) continue;
        p.w1[q * p.k1 + tap] = input_gain;
        p.w1[(q + 1) * p.k1 + tap] = -input_gain;
    }
    const int mid2 = (p.k2 - 1) / 2;
    const int k = basis.k;
    const double out_scale = gain / input_gain;
    for (int c = 1; c <= basis.count(); ++c) {
        // anchor offset (c-k-1)/k in bins, split into integer tap + fraction
        const double off = static_cast<double>(c - k - 1) / k;
        const double fl = std::floor(off);
        const int lo = static_cast<int>(fl);
        const double f = off - fl;
        auto add_tap = [&](int tap, double wgt) {
            if (wgt == 0.0) return;
            const std::size_t base = (static_cast<std::size_t>(c - 1) * p.hidden) * p.k2;
            p.w2[base + 0 * p.k2 + (mid2 + tap)] += out_scale * wgt;  // +x channel
            p.w2[base + 1 * p.k2 + (mid2 + tap)] += -out_scale * wgt; // -x channel (negated)
        };
        add_tap(lo, 1.0 - f);
        if (f > 0.0) add_tap(lo + 1, f);
    }
}

/// Adds seeded uniform noise in [-amplitude, amplitude] to every parameter,
/// in storage order.
inline void jitter_params(ModelParams& p, Rng& rng, double amplitude) {
    if (amplitude == 0.0) return;
    for (double& v : p.w1) v += rng.uniform(-amplitude, amplitude);
    for (double& v : p.b1) v += rng.uniform(-amplitude, amplitude);
    for (double& v : p.w2) v += rng.uniform(-amplitude, amplitude);
    for (double& v : p.b2) v += rng.uniform(-amplitude, amplitude);
}

/// Pre-activations of conv1 for every view, kept for the backward pass.
struct NetActivations {
    int n_bins = 0;
    int n_views = 0;
    int hidden = 0;
    std::vector<double> pre1; // [(m * hidden + q) * n_bins + n]
};

/**
 * z = Net(filtered): each view's detector signal runs through
 * conv1 -> ReLU -> conv2 independently; outputs assemble into C x N x M.
 */
inline CoeffTensor net_forward(const ModelParams& p, const Sinogram& filtered,
                               const BasisSet& basis, NetActivations* cache = nullptr) {
    if (p.out_channels != basis.count())
        throw std::invalid_argument("net_forward: model output channels do not match basis");
    const int N = filtered.geometry.n_bins;
    const int M = filtered.geometry.n_views;
    const int pad1 = (p.k1 - 1) / 2;
    const int pad2 = (p.k2 - 1) / 2;
    CoeffTensor z(basis, N, M);
    if (cache) {
        cache->n_bins = N;
        cache->n_views = M;
        cache->hidden = p.hidden;
        cache->pre1.assign(static_cast<std::size_t>(M) * p.hidden * N, 0.0);
    }
    std::vector<double> pre(static_cast<std::size_t>(p.hidden) * N);
    std::vector<double> act(static_cast<std::size_t>(p.hidden) * N);
    for (int m = 0; m < M; ++m) {
        const double* x = filtered.view_data(m);
        for (int q = 0; q < p.hidden; ++q) {
            const double* w = p.w1.data() + static_cast<std::size_t>(q) * p.k1;
            for (int i = 0; i < N; ++i) {
                double acc = p.b1[q];
                for (int d = 0; d < p.k1; ++d) {
                    const int src = i + d - pad1;
                    if (src >= 0 && src < N) acc += w[d] * x[src];
                }
                pre[static_cast<std::size_t>(q) * N + i] = acc;
                act[static_cast<std::size_t>(q) * N + i] = acc > 0.0 ? acc : 0.0;
            }
        }
        if (cache)
            std::copy(pre.begin(), pre.end(),
                      cache->pre1.begin() + static_cast<std::size_t>(m) * p.hidden * N);
        for (int c = 0; c < p.out_channels; ++c) {
            for (int i = 0; i < N; ++i) {
                double acc = p.b2[c];
                for (int q = 0; q < p.hidden; ++q) {
                    const double* w =
                        p.w2.data() + (static_cast<std::size_t>(c) * p.hidden + q) * p.k2;
                    const double* a = act.data() + static_cast<std::size_t>(q) * N;
                    for (int d = 0; d < p.k2; ++d) {
                        const int src = i + d - pad2;
                        if (src >= 0 && src < N) acc += w[d] * a[src];
                    }
                }
                z.at(c, i, m) = acc;
            }
        }
    }
    return z;
}

/// Gradients in the same shapes as ModelParams.
struct Grads {
    std::vector<double> w1, b1, w2, b2;
};

inline Grads zero_grads(const ModelParams& p) {
    Grads g;
    g.w1.assign(p.w1.size(), 0.0);
    g.b1.assign(p.b1.size(), 0.0);
    g.w2.assign(p.w2.size(), 0.0);
    g.b2.assign(p.b2.size(), 0.0);
    return g;
}

/// Exact reverse-mode gradients of the network given dL/dz. ReLU's
/// subgradient at exactly zero is taken as zero.
inline Grads net_backward(const ModelParams& p, const Sinogram& filtered,
                          const NetActivations& cache, const CoeffTensor& dz) {
    const int N = cache.n_bins;
    const int M = cache.n_views;
    const int pad1 = (p.k1 - 1) / 2;
    const int pad2 = (p.k2 - 1) / 2;
    Grads g = zero_grads(p);
    std::vector<double> act(static_cast<std::size_t>(p.hidden) * N);
    std::vector<double> dact(static_cast<std::size_t>(p.hidden) * N);
    for (int m = 0; m < M; ++m) {
        const double* x = filtered.view_data(m);
        const double* pre = cache.pre1.data() + static_cast<std::size_t>(m) * p.hidden * N;
        for (std::size_t i = 0; i < act.size(); ++i) act[i] = pre[i] > 0.0 ? pre[i] : 0.0;
        std::fill(dact.begin(), dact.end(), 0.0);
        for (int c = 0; c < p.out_channels; ++c) {
            for (int i = 0; i < N; ++i) {
                const double dzv = dz.at(c, i, m);
                if (dzv == 0.0) continue;
                g.b2[c] += dzv;
                for (int q = 0; q < p.hidden; ++q) {
                    const std::size_t wbase = (static_cast<std::size_t>(c) * p.hidden + q) * p.k2;
                    const double* a = act.data() + static_cast<std::size_t>(q) * N;
                    double* da = dact.data() + static_cast<std::size_t>(q) * N;
                    for (int d = 0; d < p.k2; ++d) {
                        const int src = i + d - pad2;
                        if (src < 0 || src >= N) continue;
                        g.w2[wbase + d] += dzv * a[src];
                        da[src] += dzv * p.w2[wbase + d];
                    }
                }
            }
        }
        for (int q = 0; q < p.hidden; ++q) {
            const double* pq = pre + static_cast<std::size_t>(q) * N;
            double* dq = dact.data() + static_cast<std::size_t>(q) * N;
            for (int i = 0; i < N; ++i) {
                const double dh = pq[i] > 0.0 ? dq[i] : 0.0;
                if (dh == 0.0) continue;
                g.b1[q] += dh;
                const std::size_t wbase = static_cast<std::size_t>(q) * p.k1;
                for (int d = 0; d < p.k1; ++d) {
                    const int src = i + d - pad1;
                    if (src >= 0 && src < N) g.w1[wbase + d] += dh * x[src];
                }
            }
        }
    }
    return g;
}

/**
 * Transpose of linfbp_forward: scatter the image gradient back to the
 * coefficient cells, dL/dz[c, n, m] = (angle_span/M) *
 * sum over pixels with [t] = n of dL/dI * phi_c(t - n).
 */
inline CoeffTensor linfbp_backward(const ImageGrid& dL_dI, const BasisSet& basis,
                                   const Geometry& geom, bool local_ensemble = false) {
    const GridSpec& grid = dL_dI.grid;
    CoeffTensor dz(basis, geom.n_bins, geom.n_views);
    const double wgt = geom.angle_span / geom.n_views;
    const int C = basis.count();
    const bool fast = basis.family == BasisFamily::linear && !local_ensemble;
    for (int m = 0; m < geom.n_views; ++m) {
        const double theta = geom.view_angle(m);
        const double cth = std::cos(theta);
        const double sth = std::sin(theta);
        std::size_t idx = 0;
        for (int i = 0; i < grid.height; ++i) {
            const double ys = grid.y(i) * sth;
            for (int j = 0; j < grid.width; ++j, ++idx) {
                const double gv = dL_dI.values[idx];
                if (gv == 0.0) continue;
                const double t = fractional_bin(grid.x(j) * cth + ys, geom);
                if (!in_support_frac(t, geom.n_bins)) continue;
                const double contrib = wgt * gv;
                auto scatter_cell = [&](int n, double u, double blend) {
                    double* cell = dz.cell(n, m);
                    if (fast) {
                        const double ku = basis.k * u;
                        const double fl = std::floor(ku);
                        const double frac = ku - fl;
                        const int cbar = static_cast<int>(fl) + basis.k;
                        if (cbar >= 0 && cbar < C) cell[cbar] += blend * contrib * (1.0 - frac);
                        if (frac > 0.0 && cbar + 1 >= 0 && cbar + 1 < C)
                            cell[cbar + 1] += blend * contrib * frac;
                    } else {
                        for (int c = 1; c <= C; ++c)
                            cell[c - 1] += blend * contrib * eval_basis(basis, c, u);
                    }
                };
                if (!local_ensemble) {
                    const int n = nearest_bin(t);
                    scatter_cell(n, t - n, 1.0);
                } else {
                    const double fl = std::floor(t);
                    const int lo = static_cast<int>(fl);
                    const double f = t - fl;
                    if (lo >= 0 && lo < geom.n_bins && f < 1.0) scatter_cell(lo, t - lo, 1.0 - f);
                    if (lo + 1 >= 0 && lo + 1 < geom.n_bins && f > 0.0)
                        scatter_cell(lo + 1, t - (lo + 1), f);
                }
            }
        }
    }
    return dz;
}

/// Sum of squared pixel differences (unnormalized).
inline double loss_mse(const ImageGrid& a, const ImageGrid& ref) {
    if (a.values.size() != ref.values.size()) throw std::invalid_argument("loss_mse: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - ref.values[i];
        acc += d * d;
    }
    return acc;
}

inline ImageGrid loss_mse_grad(const ImageGrid& a, const ImageGrid& ref) {
    ImageGrid g(a.grid);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        g.values[i] = 2.0 * (a.values[i] - ref.values[i]);
    return g;
}

/**
 * Gradient difference loss: L1 mismatch of forward finite differences along
 * both axes, replicate boundary (the last row/column difference is zero).
 */
inline double loss_gdl(const ImageGrid& a, const ImageGrid& ref) {
    if (a.values.size() != ref.values.size()) throw std::invalid_argument("loss_gdl: size mismatch");
    const int h = a.grid.height;
    const int w = a.grid.width;
    double acc = 0.0;
    for (int i = 0; i + 1 < h; ++i)
        for (int j = 0; j < w; ++j)
            acc += std::fabs((a.at(i + 1, j) - a.at(i, j)) - (ref.at(i + 1, j) - ref.at(i, j)));
    for (int i = 0; i < h; ++i)
        for (int j = 0; j + 1 < w; ++j)
            acc += std::fabs((a.at(i, j + 1) - a.at(i, j)) - (ref.at(i, j + 1) - ref.at(i, j)));
    return acc;
}

/// Subgradient of loss_gdl with sign(0) = 0.
inline ImageGrid loss_gdl_grad(const ImageGrid& a, const ImageGrid& ref) {
    const int h = a.grid.height;
    const int w = a.grid.width;
    ImageGrid g(a.grid);
    auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    for (int i = 0; i + 1 < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double s = sgn((a.at(i + 1, j) - a.at(i, j)) - (ref.at(i + 1, j) - ref.at(i, j)));
            g.at(i + 1, j) += s;
            g.at(i, j) -= s;
        }
    for (int i = 0; i < h; ++i)
        for (int j = 0; j + 1 < w; ++j) {
            const double s = sgn((a.at(i, j + 1) - a.at(i, j)) - (ref.at(i, j + 1) - ref.at(i, j)));
            g.at(i, j + 1) += s;
            g.at(i, j) -= s;
        }
    return g;
}

/**
 * RMSProp state: running average of squared gradients per parameter, decay
 * rho, stabilizer eps. momentum > 0 adds a classical momentum buffer on the
 * normalized step (an alternative reading of "momentum" for this
 * optimizer; off by default).
 */
struct OptimState {
    double rho = 0.9;
    double eps = 1e-8;
    double momentum = 0.0;
    Grads sq;
    Grads mom;
};

inline OptimState make_optim_state(const ModelParams& p, double rho = 0.9, double eps = 1e-8,
                                   double momentum = 0.0) {
    OptimState s;
    s.rho = rho;
    s.eps = eps;
    s.momentum = momentum;
    s.sq = zero_grads(p);
    s.mom = zero_grads(p);
    return s;
}

inline void rmsprop_step(ModelParams& p, const Grads& g, OptimState& s, double lr) {
    auto update = [&](std::vector<double>& param, const std::vector<double>& grad,
                      std::vector<double>& sq, std::vector<double>& mom) {
        if (param.size() != grad.size() || param.size() != sq.size())
            throw std::invalid_argument("rmsprop_step: shape mismatch");
        for (std::size_t i = 0; i < param.size(); ++i) {
            sq[i] = s.rho * sq[i] + (1.0 - s.rho) * grad[i] * grad[i];
            const double step = grad[i] / (std::sqrt(sq[i]) + s.eps);
            if (s.momentum > 0.0) {
                mom[i] = s.momentum * mom[i] + step;
                param[i] -= lr * mom[i];
            } else {
                param[i] -= lr * step;
            }
        }
    };
    update(p.w1, g.w1, s.sq.w1, s.mom.w1);
    update(p.b1, g.b1, s.sq.b1, s.mom.b1);
    update(p.w2, g.w2, s.sq.w2, s.mom.w2);
    update(p.b2, g.b2, s.sq.b2, s.mom.b2);
}

enum class InitKind { fan_in, linear_interp };

struct TrainConfig {
    int epochs = 100;
    double lr = 2e-5;
    double lambda_gdl = 0.0;
    std::uint64_t seed = 0;
    BasisSet basis{BasisFamily::linear, 2};
    FilterKind filter = FilterKind::ramp;
    int hidden = 8;
    int k1 = 5;
    int k2 = 5;
    double rho = 0.9;
    double eps = 1e-8;
    double momentum = 0.0;
    InitKind init = InitKind::fan_in;
    double init_gain = 1.0;
    double init_input_gain = 1.0;
    double init_jitter = 0.0;
    bool local_ensemble = false;
};

struct TrainSample {
    Sinogram raw;
    ImageGrid reference;
};

struct LogRow {
    int epoch = 0;
    int sample = 0;
    double loss = 0.0;
};

struct TrainState {
    ModelParams params;
    OptimState opt;
    int epoch = 0; // epochs completed
};

struct TrainResult {
    TrainState state;
    std::vector<LogRow> log;
    double initial_loss = 0.0; // summed over the dataset before any update
    double final_loss = 0.0;   // summed over the dataset after the last epoch
};

inline ModelParams init_model(const TrainConfig& cfg) {
    ModelParams params = make_model(cfg.hidden, cfg.k1, cfg.k2, cfg.basis.count());
    Rng rng(cfg.seed);
    if (cfg.init == InitKind::fan_in) {
        init_fan_in(params, rng);
    } else {
        init_linear_interp(params, cfg.basis, cfg.init_gain, cfg.init_input_gain);
        jitter_params(params, rng, cfg.init_jitter);
    }
    return params;
}

/**
 * Batch-size-1 training: per epoch, per sample, run
 * filter -> net -> LInFBP -> loss, backpropagate exactly, take one RMSProp
 * step. Deterministic for a fixed seed. Pass a previous TrainState to
 * resume; the replayed loss curve matches an uninterrupted run.
 */
inline TrainResult train(const TrainConfig& cfg, const std::vector<TrainSample>& dataset,
                         const TrainState* resume = nullptr) {
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    const Geometry geom = dataset.front().raw.geometry;
    const GridSpec grid = dataset.front().reference.grid;
    for (const auto& s : dataset) {
        if (!(s.raw.geometry == geom))
            throw std::invalid_argument("train: inconsistent geometry across dataset");
        if (!(s.reference.grid == grid))
            throw std::invalid_argument("train: inconsistent reference grid across dataset");
        if (s.raw.kind != SinogramKind::raw)
            throw std::invalid_argument("train: dataset sinograms must be raw");
    }

    const FilterSpec fs = make_filter(cfg.filter, geom.n_bins, geom.bin_width);
    std::vector<Sinogram> filtered;
    filtered.reserve(dataset.size());
    for (const auto& s : dataset) filtered.push_back(filter_sinogram(s.raw, fs));

    TrainResult result;
    if (resume) {
        result.state = *resume;
    } else {
        result.state.params = init_model(cfg);
        result.state.opt = make_optim_state(result.state.params, cfg.rho, cfg.eps, cfg.momentum);
        result.state.epoch = 0;
    }
    ModelParams& params = result.state.params;

    auto sample_loss = [&](const ImageGrid& img, const ImageGrid& ref) {
        double l = loss_mse(img, ref);
        if (cfg.lambda_gdl > 0.0) l += cfg.lambda_gdl * loss_gdl(img, ref);
        return l;
    };
    auto dataset_loss = [&]() {
        double total = 0.0;
        for (std::size_t j = 0; j < dataset.size(); ++j) {
            const CoeffTensor z = net_forward(params, filtered[j], cfg.basis);
            const ImageGrid img =
                linfbp_forward(z, cfg.basis, grid, geom, cfg.local_ensemble);
            total += sample_loss(img, dataset[j].reference);
        }
        return total;
    };

    result.initial_loss = dataset_loss();
    if (!std::isfinite(result.initial_loss))
        throw numeric_error("train: non-finite loss at initialization");

    for (int epoch = result.state.epoch; epoch < cfg.epochs; ++epoch) {
        for (std::size_t j = 0; j < dataset.size(); ++j) {
            NetActivations cache;
            const CoeffTensor z = net_forward(params, filtered[j], cfg.basis, &cache);
            const ImageGrid img = linfbp_forward(z, cfg.basis, grid, geom, cfg.local_ensemble);
            const double loss = sample_loss(img, dataset[j].reference);
            if (!std::isfinite(loss))
                throw numeric_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                    ", sample " + std::to_string(j));
            result.log.push_back({epoch, static_cast<int>(j), loss});

            ImageGrid dI = loss_mse_grad(img, dataset[j].reference);
            if (cfg.lambda_gdl > 0.0) {
                const ImageGrid dg = loss_gdl_grad(img, dataset[j].reference);
                for (std::size_t p = 0; p < dI.values.size(); ++p)
                    dI.values[p] += cfg.lambda_gdl * dg.values[p];
            }
            const CoeffTensor dz = linfbp_backward(dI, cfg.basis, geom, cfg.local_ensemble);
            const Grads g = net_backward(params, filtered[j], cache, dz);
            rmsprop_step(params, g, result.state.opt, cfg.lr);
        }
        result.state.epoch = epoch + 1;
    }
    result.final_loss = dataset_loss();
    return result;
}

/// LInFBP as a plug-in backprojection stage: predict coefficients from the
/// filtered sinogram, then evaluate the learned interpolant.
class LearnedBackprojector final : public Backprojector {
  public:
    LearnedBackprojector(ModelParams params, BasisSet basis, bool local_ensemble = false)
        : params_(std::move(params)), basis_(basis), local_ensemble_(local_ensemble) {}

    ImageGrid apply(const Sinogram& filtered, const GridSpec& grid) const override {
        const CoeffTensor z = net_forward(params_, filtered, basis_);
        return linfbp_forward(z, basis_, grid, filtered.geometry, local_ensemble_);
    }

  private:
    ModelParams params_;
    BasisSet basis_;
    bool local_ensemble_;
};

} // namespace linfbp
