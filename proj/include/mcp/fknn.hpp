#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mcp/dissimilarity.hpp"
#include "mcp/error.hpp"
#include "mcp/ingest.hpp"
#include "mcp/parallel.hpp"
#include "mcp/windowing.hpp"

namespace mcp {

/// Per-class membership values for one residue plus the fuzzy decisions:
/// class indices ordered by descending membership, equal memberships broken
/// by class order.
struct FuzzyVote {
    std::vector<double> memberships;
    std::vector<int> decisions;

    static FuzzyVote from_memberships(std::vector<double> m) {
        FuzzyVote v;
        v.decisions.resize(m.size());
        std::iota(v.decisions.begin(), v.decisions.end(), 0);
        std::stable_sort(v.decisions.begin(), v.decisions.end(), [&m](int a, int b) {
            return m[static_cast<std::size_t>(a)] > m[static_cast<std::size_t>(b)];
        });
        v.memberships = std::move(m);
        return v;
    }

    int first() const { return decisions.front(); }
};

/// Keller-style initialization: a labeled sample with label s and k' nearest
/// labeled neighbors, n_c of which carry class c, receives
///   I_s = 0.51 + 0.49 n_s/k'   and   I_c = 0.49 n_c/k'  for c != s,
/// so every row sums to one.
inline std::vector<double> initial_membership_row(int label, std::span<const int> neighbor_counts,
                                                  int k_prime, int class_count) {
    std::vector<double> row(static_cast<std::size_t>(class_count), 0.0);
    for (int c = 0; c < class_count; ++c)
        row[static_cast<std::size_t>(c)] =
            0.49 * static_cast<double>(neighbor_counts[static_cast<std::size_t>(c)]) / k_prime;
    row[static_cast<std::size_t>(label)] += 0.51;
    return row;
}

/// Membership of a query given candidate neighbor distances and the
/// neighbors' initial membership rows (Eq.-8 core). Selects the k nearest
/// candidates, breaking distance ties by candidate index; weights are
/// d^(-2/(m-1)), evaluated in log space so extreme fuzziness exponents stay
/// finite. Any zero-distance candidate short-circuits to the unweighted
/// average of all zero-distance rows.
inline FuzzyVote fuzzy_vote(std::span<const double> distances,
                            const std::vector<std::vector<double>>& initial_rows,
                            int k, double m) {
    const std::size_t n = distances.size();
    if (n == 0) throw ConfigError("fuzzy_vote: no training samples");
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw ConfigError("fuzzy_vote: k out of range");
    if (m <= 1.0) throw ConfigError("fuzzy_vote: fuzziness m must be > 1");
    const std::size_t classes = initial_rows.front().size();

    std::vector<double> acc(classes, 0.0);
    bool any_zero = false;
    int zero_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (distances[i] == 0.0) {
            any_zero = true;
            ++zero_count;
            for (std::size_t c = 0; c < classes; ++c) acc[c] += initial_rows[i][c];
        }
    }
    if (any_zero) {
        for (auto& v : acc) v /= zero_count;
        return FuzzyVote::from_memberships(std::move(acc));
    }

    thread_local std::vector<std::size_t> order;
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto closer = [&distances](std::size_t a, std::size_t b) {
        if (distances[a] != distances[b]) return distances[a] < distances[b];
        return a < b;
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), closer);
    std::sort(order.begin(), order.begin() + k, closer);

    const double exponent = 2.0 / (m - 1.0);
    thread_local std::vector<double> log_w;
    log_w.resize(static_cast<std::size_t>(k));
    double log_max = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        log_w[static_cast<std::size_t>(j)] = -exponent * std::log(distances[order[static_cast<std::size_t>(j)]]);
        log_max = std::max(log_max, log_w[static_cast<std::size_t>(j)]);
    }
    double w_sum = 0.0;
    for (int j = 0; j < k; ++j) {
        const double w = std::exp(log_w[static_cast<std::size_t>(j)] - log_max);
        w_sum += w;
        const auto& row = initial_rows[order[static_cast<std::size_t>(j)]];
        for (std::size_t c = 0; c < classes; ++c) acc[c] += row[c] * w;
    }
    for (auto& v : acc) v /= w_sum;
    return FuzzyVote::from_memberships(std::move(acc));
}

/// Fuzzy k-nearest-neighbor model over window samples. Training samples are
/// kept sorted by (protein_id, position) so index order is the documented
/// tie-break order; the model is immutable after construction.
struct FknnModel {
    int h = 17;
    int k = 15;
    int k_prime = 15;
    double m = 2.0;
    DissimilarityConfig cfg;
    ClassAlphabet classes;
    std::vector<WindowSample> samples;
    std::vector<WindowProfile> profiles;
    std::vector<std::vector<double>> initial_memberships;

    std::size_t size() const { return samples.size(); }
};

/// Initial membership rows for every training sample from its k' nearest
/// peers (self excluded) under the compound dissimilarity.
inline std::vector<std::vector<double>> initialize_memberships(
    const std::vector<WindowSample>& samples, const std::vector<WindowProfile>& profiles,
    int k_prime, const DissimilarityConfig& cfg, const ClassAlphabet& classes,
    unsigned threads = 0) {
    const std::size_t n = samples.size();
    if (k_prime < 1 || static_cast<std::size_t>(k_prime) + 1 > n)
        throw ConfigError("initialize_memberships: k' must satisfy 1 <= k' <= samples-1");
    std::vector<std::vector<double>> rows(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> dist(n);
        std::vector<std::size_t> order(n);
        std::vector<int> counts;
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                dist[j] = i == j ? std::numeric_limits<double>::infinity()
                                 : pair_dissimilarity_value(profiles[i], profiles[j], cfg);
            std::iota(order.begin(), order.end(), std::size_t{0});
            const auto closer = [&dist](std::size_t a, std::size_t b) {
                if (dist[a] != dist[b]) return dist[a] < dist[b];
                return a < b;
            };
            std::nth_element(order.begin(), order.begin() + (k_prime - 1), order.end(), closer);
            counts.assign(static_cast<std::size_t>(classes.size()), 0);
            for (int t = 0; t < k_prime; ++t)
                ++counts[static_cast<std::size_t>(
                    classes.index(samples[order[static_cast<std::size_t>(t)]].center_label))];
            rows[i] = initial_membership_row(classes.index(samples[i].center_label), counts,
                                             k_prime, classes.size());
        }
    });
    return rows;
}

inline FknnModel train_fknn(std::vector<WindowSample> labeled, int h, int k, int k_prime,
                            double m, const DissimilarityConfig& cfg,
                            const ClassAlphabet& classes = structure_classes(),
                            unsigned threads = 0) {
    check_window_size(h);
    cfg.validate(h);
    if (m <= 1.0) throw ConfigError("fuzziness m must be > 1");
    if (labeled.empty()) throw ConfigError("train_fknn: empty training set");
    if (k < 1 || static_cast<std::size_t>(k) > labeled.size())
        throw ConfigError("train_fknn: k must satisfy 1 <= k <= samples");
    std::sort(labeled.begin(), labeled.end(), [](const WindowSample& a, const WindowSample& b) {
        if (a.protein_id != b.protein_id) return a.protein_id < b.protein_id;
        return a.position < b.position;
    });
    FknnModel model;
    model.h = h;
    model.k = k;
    model.k_prime = k_prime;
    model.m = m;
    model.cfg = cfg;
    model.classes = classes;
    model.samples = std::move(labeled);
    model.profiles.reserve(model.samples.size());
    for (const auto& s : model.samples) model.profiles.emplace_back(s.window, cfg);
    model.initial_memberships =
        initialize_memberships(model.samples, model.profiles, k_prime, cfg, classes, threads);
    return model;
}

inline FuzzyVote classify(const FknnModel& model, const std::string& window) {
    if (model.samples.empty()) throw ConfigError("classify: empty model");
    const WindowProfile query(window, model.cfg);
    thread_local std::vector<double> dist;
    dist.resize(model.size());
    for (std::size_t j = 0; j < model.size(); ++j)
        dist[j] = pair_dissimilarity_value(query, model.profiles[j], model.cfg);
    return fuzzy_vote(dist, model.initial_memberships, model.k, model.m);
}

inline FuzzyVote classify(const FknnModel& model, const WindowSample& query) {
    return classify(model, query.window);
}

/// One vote per residue, in sequence order.
inline std::vector<FuzzyVote> predict_sequence(const FknnModel& model,
                                               const ProteinRecord& record, int h,
                                               unsigned threads = 0) {
    if (h != model.h)
        throw ConfigError("predict_sequence: window size " + std::to_string(h) +
                          " does not match model h=" + std::to_string(model.h));
    const auto windows = make_windows(record, h);
    std::vector<FuzzyVote> votes(windows.size());
    parallel_for(windows.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) votes[i] = classify(model, windows[i]);
    });
    return votes;
}

}  // namespace mcp
