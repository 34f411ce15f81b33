// Criteria 8-10: synthetic end-to-end pipeline quality, the conditional
// subsampled-RS126 ablation ordering, and the breakpoint sweep.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "mcp/evaluate.hpp"
#include "mcp/filter.hpp"
#include "mcp/model_io.hpp"
#include "mcp/pipeline.hpp"
#include "../support/synthetic.hpp"

using namespace mcp;

namespace {

struct FoldData {
    TrainedModels models;
    PredictionRun run;  // classifier outputs for the fold's test proteins
};

struct SyntheticBench {
    Dataset dataset;
    RunConfig config;
    std::vector<FoldData> folds;
};

// One 3-fold classification pass over the synthetic corpus, shared by the
// pipeline criteria; classification dominates the runtime.
const SyntheticBench& synthetic_bench() {
    static const SyntheticBench bench = [] {
        SyntheticBench b;
        b.dataset = testsupport::synthetic_corpus(2026);
        b.config = RunConfig{};  // paper-defaults: h=17, n=3, k=15, full measure
        b.config.folds = 3;
        b.config.seed = 7;
        b.config.validate();
        const auto assignment = fold_assignment(b.dataset.records.size(), 3, b.config.seed);
        for (const auto& fold : assignment) {
            std::set<std::size_t> test_set(fold.begin(), fold.end());
            Dataset train;
            std::vector<ProteinRecord> test_records;
            for (std::size_t i = 0; i < b.dataset.records.size(); ++i) {
                if (test_set.count(i)) {
                    test_records.push_back(b.dataset.records[i]);
                } else {
                    train.records.push_back(b.dataset.records[i]);
                    train.residue_count += b.dataset.records[i].length();
                }
            }
            FoldData fd{train_models(train, b.config), {}};
            fd.run = predict_classifiers(fd.models, test_records);
            b.folds.push_back(std::move(fd));
        }
        return b;
    }();
    return bench;
}

double pooled_q3_for_rule(const SyntheticBench& bench, int rule) {
    ConfusionMatrix pooled;
    for (const auto& fold : bench.folds) {
        PredictionRun run = fold.run;
        apply_aggregation(run, fold.models, rule);
        pooled.accumulate(confusion(run.truth_streams(), run.final_streams()));
    }
    return metrics(pooled).q3;
}

enum class Standalone { Fknn, Svm };

double pooled_q3_standalone(const SyntheticBench& bench, Standalone which) {
    const auto rules = FilterRuleSet::biological();
    ConfusionMatrix pooled;
    for (const auto& fold : bench.folds) {
        for (const auto& p : fold.run.proteins) {
            std::string s;
            if (which == Standalone::Fknn) {
                for (const auto& v : p.votes)
                    s.push_back(fold.models.fknn.classes.label(v.first()));
            } else {
                s = p.svm_classes;
            }
            s = filter_structure(s, rules);
            for (std::size_t r = 0; r < s.size(); ++r) pooled.add(p.truth[r], s[r]);
        }
    }
    return metrics(pooled).q3;
}

}  // namespace

TEST_CASE("criterion 08: synthetic end-to-end quality of the aggregated predictor") {
    const auto& bench = synthetic_bench();
    REQUIRE(bench.dataset.records.size() == 60);
    for (const auto& rec : bench.dataset.records) {
        REQUIRE(rec.length() >= 50);
        REQUIRE(rec.length() <= 120);
    }
    // Labels are a deterministic function of the width-5 window pattern.
    REQUIRE(testsupport::labels_are_window_function(bench.dataset, 5));

    const double fknn_q3 = pooled_q3_standalone(bench, Standalone::Fknn);
    const double svm_q3 = pooled_q3_standalone(bench, Standalone::Svm);
    const double best_single = std::max(fknn_q3, svm_q3);

    const double mcp1 = pooled_q3_for_rule(bench, 1);
    const double mcp2 = pooled_q3_for_rule(bench, 2);
    const double mcp5 = pooled_q3_for_rule(bench, 5);

    INFO("fknn=" << fknn_q3 << " svm=" << svm_q3 << " mcp1=" << mcp1 << " mcp2=" << mcp2
                 << " mcp5=" << mcp5);
    REQUIRE(mcp5 >= 95.0);
    REQUIRE(mcp1 >= best_single - 1.0);
    REQUIRE(mcp2 >= best_single - 1.0);
    REQUIRE(mcp5 >= best_single - 1.0);
}

TEST_CASE("criterion 10: breakpoint sweep is a deterministic 9-point curve") {
    const auto& bench = synthetic_bench();
    const auto& fold = bench.folds.front();

    const std::vector<double> breakpoints = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const auto rules = FilterRuleSet::biological();
    const auto curve =
        wheel2_sweep(fold.run.vote_streams(), fold.run.svm_streams(), fold.run.truth_streams(),
                     breakpoints, 15, bench.config.seed, 2, rules);
    REQUIRE(curve.size() == 9);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        REQUIRE(curve[i].first == breakpoints[i]);
        REQUIRE(curve[i].second >= 0.0);
        REQUIRE(curve[i].second <= 100.0);
    }
    const auto replay =
        wheel2_sweep(fold.run.vote_streams(), fold.run.svm_streams(), fold.run.truth_streams(),
                     breakpoints, 15, bench.config.seed, 2, rules);
    REQUIRE(curve == replay);
}

TEST_CASE("criterion 09: subsampled RS126 ablation ordering (needs user-supplied data)") {
    std::string path = "data/rs126.paired";
    if (const char* env = std::getenv("MCP_RS126_PATH")) path = env;
    if (!std::filesystem::exists(path))
        SKIP("RS126 dataset not supplied; set MCP_RS126_PATH or place data/rs126.paired");

    const auto full = parse_dataset(path, DatasetFormat::PairedLines);
    Dataset sub;
    sub.name = "rs126-sub12";
    for (std::size_t i = 0; i < 12 && i < full.records.size(); ++i) {
        sub.records.push_back(full.records[i]);
        sub.residue_count += full.records[i].length();
    }
    REQUIRE(sub.records.size() == 12);

    RunConfig config;
    config.folds = 3;
    config.seed = 7;
    const auto rules = FilterRuleSet::biological();
    const auto assignment = fold_assignment(sub.records.size(), 3, config.seed);

    double q3[2] = {0.0, 0.0};  // 0: LZ-only, 1: full measure
    for (int variant = 0; variant < 2; ++variant) {
        DissimilarityConfig measure;
        measure.use_rho = variant == 1;
        measure.use_ngram = variant == 1;
        ConfusionMatrix pooled;
        for (const auto& fold : assignment) {
            std::set<std::size_t> test_set(fold.begin(), fold.end());
            std::vector<ProteinRecord> train_records, test_records;
            for (std::size_t i = 0; i < sub.records.size(); ++i)
                (test_set.count(i) ? test_records : train_records).push_back(sub.records[i]);
            const auto windows = labeled_windows(train_records, config.h);
            const auto fknn = train_fknn(windows, config.h, config.k, config.k_prime, config.m,
                                         measure, structure_classes(), config.threads);
            for (const auto& rec : test_records) {
                const auto votes = predict_sequence(fknn, rec, config.h, config.threads);
                std::string s;
                for (const auto& v : votes) s.push_back(fknn.classes.label(v.first()));
                s = filter_structure(s, rules);
                for (std::size_t r = 0; r < s.size(); ++r) pooled.add(rec.structure[r], s[r]);
            }
        }
        q3[variant] = metrics(pooled).q3;
    }
    INFO("LZ-only Q3 = " << q3[0] << ", full measure Q3 = " << q3[1]);
    REQUIRE(q3[1] > q3[0]);
}
