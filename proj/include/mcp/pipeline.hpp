#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcp/aggregate.hpp"
#include "mcp/dissimilarity.hpp"
#include "mcp/error.hpp"
#include "mcp/filter.hpp"
#include "mcp/fknn.hpp"
#include "mcp/ingest.hpp"
#include "mcp/metrics.hpp"
#include "mcp/parallel.hpp"
#include "mcp/rng.hpp"
#include "mcp/svm.hpp"
#include "mcp/windowing.hpp"

namespace mcp {

/// Every tunable of an end-to-end run in one place. validate() enforces all
/// upstream parameter constraints before any computation starts.
struct RunConfig {
    int h = 17;
    DissimilarityConfig dissimilarity;

    int k = 15;
    int k_prime = 15;
    double m = 2.0;

    double svm_c = 1.0;
    double svm_gamma = -0.1;
    double svm_tol = 1e-3;
    long svm_max_iterations = 1'000'000;
    bool spectrum_clip = false;

    int aggregation_rule = 2;
    int wheel = 2;
    double breakpoint = 0.75;
    double validation_fraction = 0.2;  // wheel-1 holdout share of training proteins

    bool final_filter = true;
    bool rule5_stream_filter = true;

    std::uint64_t seed = 1;
    int folds = 10;
    unsigned threads = 0;

    void validate() const {
        check_window_size(h);
        dissimilarity.validate(h);
        if (k < 1) throw ConfigError("k must be >= 1");
        if (k_prime < 1) throw ConfigError("k' must be >= 1");
        if (m <= 1.0) throw ConfigError("fuzziness m must be > 1");
        if (svm_c <= 0.0) throw ConfigError("svm C must be positive");
        if (!(svm_gamma < 0.0)) throw ConfigError("svm gamma must be negative");
        if (svm_tol <= 0.0) throw ConfigError("svm tol must be positive");
        if (aggregation_rule < 1 || aggregation_rule > 5)
            throw ConfigError("aggregation rule must be 1..5");
        if (wheel != 1 && wheel != 2) throw ConfigError("wheel must be 1 or 2");
        if (!(breakpoint > 0.0) || breakpoint > 1.0)
            throw ConfigError("breakpoint must lie in (0, 1]");
        if (validation_fraction <= 0.0 || validation_fraction >= 1.0)
            throw ConfigError("validation fraction must lie in (0, 1)");
        if (folds < 2) throw ConfigError("folds must be >= 2");
    }

    SvmTrainOptions svm_options() const {
        SvmTrainOptions opts;
        opts.C = svm_c;
        opts.params.gamma = svm_gamma;
        opts.tol = svm_tol;
        opts.max_iterations = svm_max_iterations;
        opts.spectrum_clip = spectrum_clip;
        opts.threads = threads;
        return opts;
    }

    AggregationOptions aggregation_options() const {
        AggregationOptions opts;
        opts.final_filter = final_filter;
        opts.rule5_stream_filter = rule5_stream_filter;
        return opts;
    }
};

struct TrainedModels {
    FknnModel fknn;
    MultiSvmModel svm;
    ClassifierWeights weights;  // wheel-1 validation weights or the breakpoint split
    RunConfig config;
};

/// Per-protein classifier outputs plus the aggregated result.
struct ProteinPrediction {
    std::string id;
    std::string sequence;
    std::string truth;  // empty for unlabeled input
    std::vector<FuzzyVote> votes;
    std::string svm_classes;
    std::string aggregated;       // after the aggregation pool, before final filtering
    std::string final_structure;  // after final filtering (== aggregated when disabled)
};

struct PredictionRun {
    std::vector<ProteinPrediction> proteins;
    RunConfig config;

    std::vector<std::vector<FuzzyVote>> vote_streams() const {
        std::vector<std::vector<FuzzyVote>> v;
        v.reserve(proteins.size());
        for (const auto& p : proteins) v.push_back(p.votes);
        return v;
    }
    std::vector<std::string> svm_streams() const {
        std::vector<std::string> v;
        v.reserve(proteins.size());
        for (const auto& p : proteins) v.push_back(p.svm_classes);
        return v;
    }
    std::vector<std::string> truth_streams() const {
        std::vector<std::string> v;
        v.reserve(proteins.size());
        for (const auto& p : proteins) v.push_back(p.truth);
        return v;
    }
    std::vector<std::string> final_streams() const {
        std::vector<std::string> v;
        v.reserve(proteins.size());
        for (const auto& p : proteins) v.push_back(p.final_structure);
        return v;
    }
};

inline std::vector<WindowSample> labeled_windows(const std::vector<ProteinRecord>& records,
                                                 int h) {
    std::vector<WindowSample> out;
    for (const auto& rec : records) {
        if (!rec.labeled())
            throw ConfigError("training record '" + rec.id + "' has no structure labels");
        auto ws = make_windows(rec, h);
        for (auto& w : ws) out.push_back(std::move(w));
    }
    return out;
}

namespace detail {

inline double classifier_accuracy(const std::vector<std::string>& truth,
                                  const std::vector<std::string>& predicted,
                                  const ClassAlphabet& classes) {
    return metrics(confusion(truth, predicted, classes)).q3;
}

}  // namespace detail

/// Classify records with both trained classifiers; aggregation is applied
/// separately so one expensive classification pass can feed many rules.
inline PredictionRun predict_classifiers(const TrainedModels& models,
                                         const std::vector<ProteinRecord>& records) {
    PredictionRun run;
    run.config = models.config;
    run.proteins.resize(records.size());
    for (std::size_t p = 0; p < records.size(); ++p) {
        const auto& rec = records[p];
        auto& out = run.proteins[p];
        out.id = rec.id;
        out.sequence = rec.sequence;
        out.truth = rec.structure;
        const auto windows = make_windows(rec, models.config.h);
        out.votes.resize(windows.size());
        out.svm_classes.resize(windows.size());
        parallel_for(windows.size(), models.config.threads,
                     [&](std::size_t begin, std::size_t end) {
                         for (std::size_t i = begin; i < end; ++i) {
                             out.votes[i] = classify(models.fknn, windows[i]);
                             out.svm_classes[i] = predict_multiclass(models.svm, windows[i]);
                         }
                     });
    }
    return run;
}

/// Fill aggregated/final structures for the configured rule (or an explicit
/// rule override, for ablations over one classification pass).
inline void apply_aggregation(PredictionRun& run, const TrainedModels& models,
                              int rule_override = 0) {
    const RunConfig& cfg = run.config;
    const int rule = rule_override > 0 ? rule_override : cfg.aggregation_rule;
    AggregationContext ctx = (rule == 2 || rule == 4 || rule == 5)
                                 ? make_context(rule, models.weights, cfg.seed)
                                 : make_context(rule, cfg.seed);
    const auto rules = FilterRuleSet::biological();
    AggregationOptions opts = cfg.aggregation_options();
    const auto& classes = models.fknn.classes;

    AggregationOptions no_final = opts;
    no_final.final_filter = false;
    const auto votes = run.vote_streams();
    const auto svm = run.svm_streams();
    const auto raw = aggregate_run(votes, svm, ctx, rules, no_final, classes);
    for (std::size_t p = 0; p < run.proteins.size(); ++p) {
        run.proteins[p].aggregated = raw[p];
        run.proteins[p].final_structure =
            opts.final_filter ? filter_structure(raw[p], rules, classes) : raw[p];
    }
}

/// Train both classifiers. With wheel 1 a validation share of the training
/// proteins is held out, both classifiers are scored on it and the weights
/// derive from those accuracies; the returned models are the ones trained on
/// the remaining proteins. With wheel 2 the breakpoint splits the interval.
inline TrainedModels train_models(const Dataset& train, const RunConfig& config) {
    config.validate();
    if (train.records.empty()) throw ConfigError("train_models: empty dataset");
    TrainedModels models;
    models.config = config;

    std::vector<ProteinRecord> fit_records = train.records;
    std::vector<ProteinRecord> validation_records;
    if (config.wheel == 1) {
        const std::size_t held =
            std::max<std::size_t>(1, static_cast<std::size_t>(
                                         config.validation_fraction *
                                         static_cast<double>(train.records.size())));
        if (held >= train.records.size())
            throw ConfigError("wheel 1 validation split leaves no training proteins");
        std::vector<std::size_t> order(train.records.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        SeededRng rng(rng::derive_stream(config.seed, 0x77EE1));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);
        fit_records.clear();
        for (std::size_t idx = 0; idx < order.size(); ++idx)
            (idx < held ? validation_records : fit_records).push_back(train.records[order[idx]]);
    }

    auto windows = labeled_windows(fit_records, config.h);
    models.fknn = train_fknn(windows, config.h, config.k, config.k_prime, config.m,
                             config.dissimilarity, structure_classes(), config.threads);
    models.svm = train_multiclass(windows, config.h, config.svm_options());

    if (config.wheel == 1) {
        auto validation_run = predict_classifiers(models, validation_records);
        std::vector<std::string> fknn_pred, svm_pred;
        for (const auto& p : validation_run.proteins) {
            std::string s;
            for (const auto& v : p.votes) s.push_back(models.fknn.classes.label(v.first()));
            fknn_pred.push_back(std::move(s));
            svm_pred.push_back(p.svm_classes);
        }
        const auto truth = validation_run.truth_streams();
        models.weights = wheel1_weights(
            detail::classifier_accuracy(truth, fknn_pred, models.fknn.classes),
            detail::classifier_accuracy(truth, svm_pred, models.fknn.classes));
    } else {
        models.weights = breakpoint_weights(config.breakpoint);
    }
    return models;
}

/// Full prediction: classify then aggregate with the configured rule.
inline PredictionRun predict_run(const TrainedModels& models,
                                 const std::vector<ProteinRecord>& records) {
    PredictionRun run = predict_classifiers(models, records);
    apply_aggregation(run, models);
    return run;
}

}  // namespace mcp
