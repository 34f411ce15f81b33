#pragma once

#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "mcp/error.hpp"
#include "mcp/ingest.hpp"
#include "mcp/metrics.hpp"
#include "mcp/pipeline.hpp"
#include "mcp/rng.hpp"

namespace mcp {

struct FoldResult {
    std::vector<std::size_t> test_proteins;  // indices into the source dataset
    ConfusionMatrix cm;
    MetricReport report;
};

struct CrossValidationResult {
    std::vector<FoldResult> folds;
    ConfusionMatrix pooled_cm;
    MetricReport pooled;

    CrossValidationResult() : pooled_cm(structure_classes()) {}
};

/// Deterministic protein-level fold assignment: proteins are shuffled by the
/// seed and dealt round-robin. Folds split whole proteins because windows of
/// one protein overlap and would otherwise leak across the split.
inline std::vector<std::vector<std::size_t>> fold_assignment(std::size_t proteins, int folds,
                                                             std::uint64_t seed) {
    if (folds < 2) throw ConfigError("kfold: folds must be >= 2");
    if (proteins < static_cast<std::size_t>(folds))
        throw ConfigError("kfold: fewer proteins than folds");
    std::vector<std::size_t> order(proteins);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SeededRng rng(rng::derive_stream(seed, 0xF01D5));
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);
    std::vector<std::vector<std::size_t>> assignment(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < order.size(); ++i)
        assignment[i % static_cast<std::size_t>(folds)].push_back(order[i]);
    return assignment;
}

/// K-fold cross-validation of the full pipeline; per-fold reports plus a
/// pooled confusion matrix aggregated over folds.
inline CrossValidationResult kfold(const Dataset& dataset, int folds, const RunConfig& config) {
    config.validate();
    const auto assignment = fold_assignment(dataset.records.size(), folds, config.seed);
    CrossValidationResult result;
    for (std::size_t f = 0; f < assignment.size(); ++f) {
        std::set<std::size_t> test_set(assignment[f].begin(), assignment[f].end());
        Dataset train;
        train.name = dataset.name + "/fold" + std::to_string(f);
        std::vector<ProteinRecord> test_records;
        for (std::size_t i = 0; i < dataset.records.size(); ++i) {
            if (test_set.count(i)) {
                test_records.push_back(dataset.records[i]);
            } else {
                train.records.push_back(dataset.records[i]);
                train.residue_count += dataset.records[i].length();
            }
        }
        const auto models = train_models(train, config);
        const auto run = predict_run(models, test_records);

        FoldResult fold{.test_proteins = assignment[f],
                        .cm = confusion(run.truth_streams(), run.final_streams()),
                        .report = MetricReport{}};
        fold.report = metrics(fold.cm);
        result.pooled_cm.accumulate(fold.cm);
        result.folds.push_back(std::move(fold));
    }
    result.pooled = metrics(result.pooled_cm);
    return result;
}

struct IndependentTestResult {
    ConfusionMatrix cm;
    MetricReport report;
    std::vector<std::string> warnings;

    IndependentTestResult() : cm(structure_classes()) {}
};

/// Train on one dataset, evaluate on another. Shared protein ids produce a
/// warning, not an error.
inline IndependentTestResult independent_test(const Dataset& train, const Dataset& test,
                                              const RunConfig& config) {
    config.validate();
    IndependentTestResult result;
    std::set<std::string> train_ids;
    for (const auto& rec : train.records) train_ids.insert(rec.id);
    for (const auto& rec : test.records)
        if (train_ids.count(rec.id))
            result.warnings.push_back("protein '" + rec.id + "' appears in both datasets");
    const auto models = train_models(train, config);
    const auto run = predict_run(models, test.records);
    result.cm = confusion(run.truth_streams(), run.final_streams());
    result.report = metrics(result.cm);
    return result;
}

}  // namespace mcp
