#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mcp/dissimilarity.hpp"
#include "mcp/error.hpp"
#include "mcp/ingest.hpp"
#include "mcp/parallel.hpp"
#include "mcp/windowing.hpp"

namespace mcp {

/// Exponential edit kernel K(x,y) = exp(gamma * edit(x,y)). The exponent
/// coefficient must be negative so the kernel decays with distance like an
/// RBF; K(x,x) = 1.
struct EditKernelParams {
    double gamma = -0.1;

    void validate() const {
        if (!(gamma < 0.0)) throw ConfigError("edit kernel gamma must be negative");
    }
};

inline double edit_kernel(std::string_view x, std::string_view y, const EditKernelParams& params) {
    return std::exp(params.gamma * edit_distance(x, y));
}

namespace detail {

// Jacobi eigendecomposition for small symmetric matrices (row-major n x n).
// Returns eigenvalues; optionally accumulates eigenvectors as columns of V.
inline std::vector<double> jacobi_eigen(std::vector<double>& a, int n,
                                        std::vector<double>* vectors = nullptr) {
    std::vector<double> v;
    if (vectors) {
        v.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[static_cast<std::size_t>(p) * n + q] *
                                                   a[static_cast<std::size_t>(p) * n + q];
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[static_cast<std::size_t>(p) * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[static_cast<std::size_t>(p) * n + p];
                const double aqq = a[static_cast<std::size_t>(q) * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int r = 0; r < n; ++r) {
                    const double arp = a[static_cast<std::size_t>(r) * n + p];
                    const double arq = a[static_cast<std::size_t>(r) * n + q];
                    a[static_cast<std::size_t>(r) * n + p] = c * arp - s * arq;
                    a[static_cast<std::size_t>(r) * n + q] = s * arp + c * arq;
                }
                for (int r = 0; r < n; ++r) {
                    const double apr = a[static_cast<std::size_t>(p) * n + r];
                    const double aqr = a[static_cast<std::size_t>(q) * n + r];
                    a[static_cast<std::size_t>(p) * n + r] = c * apr - s * aqr;
                    a[static_cast<std::size_t>(q) * n + r] = s * apr + c * aqr;
                }
                if (vectors)
                    for (int r = 0; r < n; ++r) {
                        const double vrp = v[static_cast<std::size_t>(r) * n + p];
                        const double vrq = v[static_cast<std::size_t>(r) * n + q];
                        v[static_cast<std::size_t>(r) * n + p] = c * vrp - s * vrq;
                        v[static_cast<std::size_t>(r) * n + q] = s * vrp + c * vrq;
                    }
            }
        }
    }
    std::vector<double> eigenvalues(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eigenvalues[static_cast<std::size_t>(i)] =
        a[static_cast<std::size_t>(i) * n + i];
    if (vectors) *vectors = std::move(v);
    return eigenvalues;
}

}  // namespace detail

/// Replace a symmetric kernel matrix (row-major n x n) by its nearest PSD
/// counterpart: negative eigenvalues are clipped to zero. Intended for small
/// training instances; the edit kernel is not guaranteed positive
/// semi-definite.
inline void clip_spectrum(std::vector<double>& kernel, int n) {
    if (n > 4000) throw ConfigError("clip_spectrum: instance too large (limit 4000 samples)");
    std::vector<double> work = kernel;
    std::vector<double> vectors;
    const auto eigenvalues = detail::jacobi_eigen(work, n, &vectors);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double sum = 0.0;
            for (int t = 0; t < n; ++t) {
                const double lambda = std::max(0.0, eigenvalues[static_cast<std::size_t>(t)]);
                sum += lambda * vectors[static_cast<std::size_t>(i) * n + t] *
                       vectors[static_cast<std::size_t>(j) * n + t];
            }
            kernel[static_cast<std::size_t>(i) * n + j] = sum;
            kernel[static_cast<std::size_t>(j) * n + i] = sum;
        }
}

/// Row access over a kernel matrix: dense float storage up to the given
/// budget, per-row recomputation above it. Semantics are unaffected by the
/// storage mode.
class KernelMatrix {
public:
    KernelMatrix(std::size_t n, std::function<float(std::size_t, std::size_t)> eval,
                 std::size_t dense_limit = 10'000)
        : n_(n), eval_(std::move(eval)) {
        if (n_ <= dense_limit) {
            dense_.resize(n_ * n_);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = i; j < n_; ++j)
                    dense_[i * n_ + j] = dense_[j * n_ + i] = eval_(i, j);
        }
    }

    /// Construct from a precomputed dense matrix (e.g. after clip_spectrum).
    KernelMatrix(std::size_t n, std::vector<float> dense)
        : n_(n), dense_(std::move(dense)) {}

    std::size_t size() const { return n_; }
    bool dense() const { return !dense_.empty(); }

    const float* row(std::size_t i) const {
        if (dense()) return &dense_[i * n_];
        scratch_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) scratch_[j] = eval_(i, j);
        return scratch_.data();
    }

    float at(std::size_t i, std::size_t j) const {
        return dense() ? dense_[i * n_ + j] : eval_(i, j);
    }

private:
    std::size_t n_;
    std::function<float(std::size_t, std::size_t)> eval_;
    std::vector<float> dense_;
    mutable std::vector<float> scratch_;
};

struct SmoOptions {
    double C = 1.0;
    double tol = 1e-3;
    long max_iterations = 1'000'000;
};

struct SmoSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    long iterations = 0;
};

/// Sequential minimal optimization for the soft-margin dual
///   min 1/2 a'Qa - e'a,  0 <= a <= C,  y'a = 0,  Q_ij = y_i y_j K_ij,
/// selecting the maximal violating pair each step and stopping when the KKT
/// gap falls below tol.
inline SmoSolution smo_solve(const KernelMatrix& kernel, const std::vector<int>& y,
                             const SmoOptions& opts) {
    const std::size_t n = y.size();
    if (opts.C <= 0.0) throw ConfigError("smo_solve: C must be positive");
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // G = Qa - e with a = 0

    const double C = opts.C;
    long iter = 0;
    double gap = std::numeric_limits<double>::infinity();
    while (true) {
        // Maximal violating pair over I_up / I_low.
        int i = -1, j = -1;
        double up_best = -std::numeric_limits<double>::infinity();
        double low_best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double score = -y[t] * grad[t];
            const bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0.0);
            const bool in_low = (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < C);
            if (in_up && score > up_best) { up_best = score; i = static_cast<int>(t); }
            if (in_low && score < low_best) { low_best = score; j = static_cast<int>(t); }
        }
        gap = up_best - low_best;
        if (i < 0 || j < 0 || gap <= opts.tol) break;
        if (++iter > opts.max_iterations)
            throw ConvergenceError("SMO did not converge within " +
                                   std::to_string(opts.max_iterations) +
                                   " iterations; KKT violation " + std::to_string(gap));

        const float* row_i = kernel.row(static_cast<std::size_t>(i));
        const double kii = row_i[i], kjj = kernel.at(static_cast<std::size_t>(j),
                                                     static_cast<std::size_t>(j));
        const double kij = row_i[j];
        double quad = kii + kjj - 2.0 * kij;
        if (quad <= 0.0) quad = 1e-12;  // indefinite kernel guard
        // Move along a_i += y_i t, a_j -= y_j t.
        const double b = y[i] * grad[static_cast<std::size_t>(i)] -
                         y[j] * grad[static_cast<std::size_t>(j)];
        double t_step = -b / quad;
        const auto bounds = [C](int yy, double a, bool plus) {
            // valid t range so that a +/- yy*t stays in [0, C]
            if (plus) return yy > 0 ? std::pair<double, double>(-a, C - a)
                                    : std::pair<double, double>(a - C, a);
            return yy > 0 ? std::pair<double, double>(a - C, a)
                          : std::pair<double, double>(-a, C - a);
        };
        const auto [lo1, hi1] = bounds(y[i], alpha[static_cast<std::size_t>(i)], true);
        const auto [lo2, hi2] = bounds(y[j], alpha[static_cast<std::size_t>(j)], false);
        t_step = std::clamp(t_step, std::max(lo1, lo2), std::min(hi1, hi2));

        const double delta_i = y[i] * t_step;
        const double delta_j = -y[j] * t_step;
        alpha[static_cast<std::size_t>(i)] += delta_i;
        alpha[static_cast<std::size_t>(j)] += delta_j;
        // Snap to the box so the index sets stay crisp.
        for (int t : {i, j}) {
            auto& a = alpha[static_cast<std::size_t>(t)];
            if (a < 1e-12) a = 0.0;
            if (a > C - 1e-12) a = C;
        }
        const float* row_j = kernel.row(static_cast<std::size_t>(j));
        row_i = kernel.dense() ? kernel.row(static_cast<std::size_t>(i)) : nullptr;
        if (row_i) {
            for (std::size_t t = 0; t < n; ++t)
                grad[t] += y[t] * (y[i] * row_i[t] * delta_i + y[j] * row_j[t] * delta_j);
        } else {
            // Sparse mode: evaluate row i on the fly (row_j scratch is live).
            for (std::size_t t = 0; t < n; ++t)
                grad[t] += y[t] * (y[i] * kernel.at(static_cast<std::size_t>(i), t) * delta_i +
                                   y[j] * row_j[t] * delta_j);
        }
    }

    SmoSolution out;
    out.iterations = iter;
    // Bias from free support vectors, else the KKT midpoint.
    double sum = 0.0;
    int free_count = 0;
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double score = -y[t] * grad[t];
        if (alpha[t] > 0.0 && alpha[t] < C) { sum += score; ++free_count; }
        const bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0.0);
        const bool in_low = (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < C);
        if (in_up) up_best = std::max(up_best, score);
        if (in_low) low_best = std::min(low_best, score);
    }
    out.bias = free_count > 0 ? sum / free_count : 0.5 * (up_best + low_best);
    out.alpha = std::move(alpha);
    return out;
}

/// Soft-margin binary classifier for one unordered class pair. Samples of
/// label_pair.first carry y = +1.
struct BinarySvmModel {
    char positive_label = 0;
    char negative_label = 0;
    std::vector<std::string> support_windows;
    std::vector<char> support_labels;
    std::vector<double> alphas;  // 0 < alpha <= C
    double bias = 0.0;
    EditKernelParams params;
    double C = 1.0;

    double decision(std::string_view window) const {
        double f = bias;
        for (std::size_t s = 0; s < support_windows.size(); ++s) {
            const int y = support_labels[s] == positive_label ? 1 : -1;
            f += alphas[s] * y * edit_kernel(support_windows[s], window, params);
        }
        return f;
    }

    /// Vote of this binary: the positive label wins ties.
    char vote(std::string_view window) const {
        return decision(window) >= 0.0 ? positive_label : negative_label;
    }
};

struct SvmTrainOptions {
    double C = 1.0;
    EditKernelParams params;
    double tol = 1e-3;
    long max_iterations = 1'000'000;
    bool spectrum_clip = false;
    unsigned threads = 0;
};

inline BinarySvmModel train_binary(const std::vector<WindowSample>& samples,
                                   char positive_label, char negative_label,
                                   const SvmTrainOptions& opts) {
    opts.params.validate();
    if (opts.C <= 0.0) throw ConfigError("train_binary: C must be positive");
    const std::size_t n = samples.size();
    std::vector<int> y(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (samples[i].center_label == positive_label) { y[i] = 1; has_pos = true; }
        else if (samples[i].center_label == negative_label) { y[i] = -1; has_neg = true; }
        else throw ConfigError("train_binary: sample label outside the class pair");
    }
    if (!has_pos || !has_neg)
        throw ConfigError("train_binary: both classes must be present");

    const auto eval = [&samples, &opts](std::size_t i, std::size_t j) {
        return static_cast<float>(edit_kernel(samples[i].window, samples[j].window, opts.params));
    };
    KernelMatrix kernel = [&] {
        if (!opts.spectrum_clip) return KernelMatrix(n, eval);
        std::vector<double> dense(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                dense[i * n + j] = dense[j * n + i] = eval(i, j);
        clip_spectrum(dense, static_cast<int>(n));
        std::vector<float> densef(dense.begin(), dense.end());
        return KernelMatrix(n, std::move(densef));
    }();

    SmoOptions smo_opts;
    smo_opts.C = opts.C;
    smo_opts.tol = opts.tol;
    smo_opts.max_iterations = opts.max_iterations;
    const SmoSolution sol = smo_solve(kernel, y, smo_opts);

    BinarySvmModel model;
    model.positive_label = positive_label;
    model.negative_label = negative_label;
    model.params = opts.params;
    model.C = opts.C;
    model.bias = sol.bias;
    for (std::size_t i = 0; i < n; ++i) {
        if (sol.alpha[i] > 0.0) {
            model.support_windows.push_back(samples[i].window);
            model.support_labels.push_back(samples[i].center_label);
            model.alphas.push_back(sol.alpha[i]);
        }
    }
    return model;
}

/// One-vs-one multi-class model: l(l-1)/2 binaries combined by voting.
struct MultiSvmModel {
    std::vector<BinarySvmModel> binaries;
    ClassAlphabet classes;
    int h = 17;

    bool trained() const { return !binaries.empty(); }
};

inline MultiSvmModel train_multiclass(const std::vector<WindowSample>& labeled, int h,
                                      const SvmTrainOptions& opts,
                                      const ClassAlphabet& classes = structure_classes()) {
    check_window_size(h);
    MultiSvmModel model;
    model.classes = classes;
    model.h = h;
    std::vector<std::pair<char, char>> pairs;
    for (int a = 0; a < classes.size(); ++a)
        for (int b = a + 1; b < classes.size(); ++b)
            pairs.emplace_back(classes.label(a), classes.label(b));
    model.binaries.resize(pairs.size());
    parallel_for(pairs.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            std::vector<WindowSample> subset;
            for (const auto& s : labeled)
                if (s.center_label == pairs[p].first || s.center_label == pairs[p].second)
                    subset.push_back(s);
            SvmTrainOptions sub_opts = opts;
            sub_opts.threads = 1;
            model.binaries[p] = train_binary(subset, pairs[p].first, pairs[p].second, sub_opts);
        }
    });
    return model;
}

/// Majority vote over the binaries; vote ties fall back to class order.
inline char predict_multiclass(const MultiSvmModel& model, std::string_view window) {
    if (!model.trained()) throw ConfigError("predict_multiclass: untrained model");
    std::vector<int> votes(static_cast<std::size_t>(model.classes.size()), 0);
    for (const auto& bin : model.binaries)
        ++votes[static_cast<std::size_t>(model.classes.index(bin.vote(window)))];
    int best = 0;
    for (int c = 1; c < model.classes.size(); ++c)
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    return model.classes.label(best);
}

inline char predict_multiclass(const MultiSvmModel& model, const WindowSample& query) {
    return predict_multiclass(model, query.window);
}

}  // namespace mcp
