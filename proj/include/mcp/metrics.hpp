#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mcp/error.hpp"
#include "mcp/ingest.hpp"

namespace mcp {

/// Residue-level confusion counts; rows index the true class, columns the
/// predicted class, both in class-alphabet order.
struct ConfusionMatrix {
    ClassAlphabet classes;
    std::vector<std::vector<long long>> counts;

    explicit ConfusionMatrix(const ClassAlphabet& alphabet = structure_classes())
        : classes(alphabet),
          counts(static_cast<std::size_t>(alphabet.size()),
                 std::vector<long long>(static_cast<std::size_t>(alphabet.size()), 0)) {}

    void add(char truth, char predicted, long long n = 1) {
        const int t = classes.index(truth);
        const int p = classes.index(predicted);
        if (t < 0 || p < 0)
            throw ConfigError("confusion: character outside the class alphabet");
        counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)] += n;
    }

    void accumulate(const ConfusionMatrix& other) {
        for (std::size_t t = 0; t < counts.size(); ++t)
            for (std::size_t p = 0; p < counts.size(); ++p)
                counts[t][p] += other.counts[t][p];
    }

    long long total() const {
        long long sum = 0;
        for (const auto& row : counts)
            for (long long v : row) sum += v;
        return sum;
    }

    long long trace() const {
        long long sum = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
        return sum;
    }
};

inline ConfusionMatrix confusion(const std::vector<std::string>& truth,
                                 const std::vector<std::string>& predicted,
                                 const ClassAlphabet& classes = structure_classes()) {
    if (truth.size() != predicted.size())
        throw ConfigError("confusion: protein counts differ");
    ConfusionMatrix cm(classes);
    for (std::size_t p = 0; p < truth.size(); ++p) {
        if (truth[p].size() != predicted[p].size())
            throw ConfigError("confusion: residue counts differ in protein " + std::to_string(p));
        for (std::size_t r = 0; r < truth[p].size(); ++r) cm.add(truth[p][r], predicted[p][r]);
    }
    return cm;
}

struct ClassMetrics {
    double precision = 0.0;    // percent
    double recall = 0.0;       // percent; also reported as the per-class Q
    double specificity = 0.0;  // percent
    double mcc = 0.0;          // in [-1, 1]
};

struct MetricReport {
    double q3 = 0.0;  // percent correct residues, trace/total
    // The one-vs-rest sum formula printed in the evaluation-measures section;
    // it double-counts TN across classes and is kept for comparison only.
    double overall_accuracy_paper = 0.0;
    std::vector<ClassMetrics> per_class;
};

/// One-vs-rest metrics per class. Denominator-zero cases (including MCC)
/// yield 0 by convention.
inline MetricReport metrics(const ConfusionMatrix& cm) {
    const long long total = cm.total();
    if (total == 0) throw ConfigError("metrics: empty confusion matrix");
    const int l = cm.classes.size();
    MetricReport report;
    report.q3 = 100.0 * static_cast<double>(cm.trace()) / static_cast<double>(total);
    double paper_num = 0.0, paper_den = 0.0;
    for (int j = 0; j < l; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        long long tp = cm.counts[js][js];
        long long fn = 0, fp = 0;
        for (int t = 0; t < l; ++t) {
            if (t == j) continue;
            fn += cm.counts[js][static_cast<std::size_t>(t)];
            fp += cm.counts[static_cast<std::size_t>(t)][js];
        }
        const long long tn = total - tp - fn - fp;
        ClassMetrics m;
        if (tp + fp > 0) m.precision = 100.0 * tp / static_cast<double>(tp + fp);
        if (tp + fn > 0) m.recall = 100.0 * tp / static_cast<double>(tp + fn);
        if (tn + fp > 0) m.specificity = 100.0 * tn / static_cast<double>(tn + fp);
        const double denom = static_cast<double>(tp + fp) * static_cast<double>(tp + fn) *
                             static_cast<double>(tn + fp) * static_cast<double>(tn + fn);
        if (denom > 0.0)
            m.mcc = (static_cast<double>(tp) * tn - static_cast<double>(fp) * fn) /
                    std::sqrt(denom);
        report.per_class.push_back(m);
        paper_num += static_cast<double>(tp + tn);
        paper_den += static_cast<double>(tp + tn + fp + fn);
    }
    report.overall_accuracy_paper = 100.0 * paper_num / paper_den;
    return report;
}

}  // namespace mcp
