#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcp/error.hpp"
#include "mcp/filter.hpp"
#include "mcp/fknn.hpp"
#include "mcp/ingest.hpp"
#include "mcp/metrics.hpp"
#include "mcp/rng.hpp"

namespace mcp {

/// Roulette-wheel weights for the two classifiers; they always sum to one.
struct ClassifierWeights {
    enum class Source { Wheel1, Wheel2Breakpoint };

    double omega_fknn = 0.5;
    double omega_svm = 0.5;
    Source source = Source::Wheel2Breakpoint;
};

/// Wheel 1: the weaker classifier receives min(acc)/(acc_fknn + acc_svm),
/// the stronger the complement.
inline ClassifierWeights wheel1_weights(double acc_fknn, double acc_svm) {
    if (acc_fknn < 0.0 || acc_svm < 0.0 || acc_fknn + acc_svm <= 0.0)
        throw ConfigError("wheel1_weights: accuracies must be non-negative with positive sum");
    const double omega1 = std::min(acc_fknn, acc_svm) / (acc_fknn + acc_svm);
    ClassifierWeights w;
    w.source = ClassifierWeights::Source::Wheel1;
    if (acc_fknn <= acc_svm) {
        w.omega_fknn = omega1;
        w.omega_svm = 1.0 - omega1;
    } else {
        w.omega_svm = omega1;
        w.omega_fknn = 1.0 - omega1;
    }
    return w;
}

/// Wheel 2: breakpoint b dedicates [0, b] to the fuzzy classifier and (b, 1]
/// to the SVM.
inline ClassifierWeights breakpoint_weights(double breakpoint) {
    if (!(breakpoint > 0.0) || breakpoint > 1.0)
        throw ConfigError("breakpoint must lie in (0, 1]");
    ClassifierWeights w;
    w.omega_fknn = breakpoint;
    w.omega_svm = 1.0 - breakpoint;
    w.source = ClassifierWeights::Source::Wheel2Breakpoint;
    return w;
}

struct AggregationContext {
    int rule = 2;  // 1..5
    ClassifierWeights weights;
    bool has_weights = false;
    std::uint64_t rng_seed = 1;
    int samples_per_decision = 1;  // full aggregation passes averaged by sweeps

    void validate() const {
        if (rule < 1 || rule > 5)
            throw ConfigError("aggregation rule must be 1..5, got " + std::to_string(rule));
        if ((rule == 2 || rule == 4 || rule == 5) && !has_weights)
            throw ConfigError("aggregation rule " + std::to_string(rule) +
                              " requires classifier weights");
        if (samples_per_decision < 1) throw ConfigError("samples_per_decision must be >= 1");
    }
};

inline AggregationContext make_context(int rule, std::uint64_t seed) {
    AggregationContext ctx;
    ctx.rule = rule;
    ctx.rng_seed = seed;
    ctx.validate();
    return ctx;
}

inline AggregationContext make_context(int rule, const ClassifierWeights& weights,
                                       std::uint64_t seed) {
    AggregationContext ctx;
    ctx.rule = rule;
    ctx.weights = weights;
    ctx.has_weights = true;
    ctx.rng_seed = seed;
    ctx.validate();
    return ctx;
}

/// Consensus for one residue. `draw` is the uniform [0,1) roulette value;
/// rules 1 and 3 ignore it. Decisions index the vote's class ordering, so
/// the rules work for any class count: rule 3/4 consume the last decision.
/// Rule 5 arbitrates exactly like rule 2 -- its stream filtering is applied
/// by aggregate_run before the per-residue step.
inline int aggregate_residue(const FuzzyVote& vote, int svm_class,
                             const AggregationContext& ctx, double draw) {
    ctx.validate();
    const int first = vote.decisions.front();
    if (first == svm_class) return first;
    const std::size_t last = vote.decisions.size() - 1;
    switch (ctx.rule) {
        case 1: return vote.decisions[1];
        case 3: return vote.decisions[last];
        case 2:
        case 5: return draw <= ctx.weights.omega_fknn ? first : svm_class;
        case 4:
            return draw <= ctx.weights.omega_fknn ? vote.decisions[1]
                                                  : vote.decisions[last];
        default: throw ConfigError("unreachable aggregation rule");
    }
}

struct AggregationOptions {
    bool final_filter = true;         // filtration after the aggregation pool
    bool rule5_stream_filter = true;  // the extra pre-filtration of rule 5
};

/// Aggregate one protein's classifier outputs into a structure string.
/// Draws are indexed by residue position within the protein's own stream, so
/// per-protein aggregation is order-independent and replayable.
inline std::string aggregate_protein(const std::vector<FuzzyVote>& votes,
                                     const std::string& svm_classes,
                                     const AggregationContext& ctx,
                                     const FilterRuleSet& rules, const AggregationOptions& opts,
                                     std::uint64_t protein_stream,
                                     const ClassAlphabet& classes = structure_classes()) {
    if (votes.size() != svm_classes.size())
        throw ConfigError("aggregate_protein: vote and SVM streams differ in length");
    std::string out;
    out.reserve(votes.size());
    if (ctx.rule == 5 && opts.rule5_stream_filter) {
        std::string fknn_stream, svm_stream;
        fknn_stream.reserve(votes.size());
        for (const auto& v : votes) fknn_stream.push_back(classes.label(v.first()));
        const std::string fknn_f = filter_structure(fknn_stream, rules, classes);
        const std::string svm_f = filter_structure(svm_classes, rules, classes);
        for (std::size_t r = 0; r < votes.size(); ++r) {
            if (fknn_f[r] == svm_f[r]) {
                out.push_back(fknn_f[r]);
            } else {
                const double draw = rng::uniform(protein_stream, r);
                out.push_back(draw <= ctx.weights.omega_fknn ? fknn_f[r] : svm_f[r]);
            }
        }
    } else {
        for (std::size_t r = 0; r < votes.size(); ++r) {
            const double draw = rng::uniform(protein_stream, r);
            const int cls = aggregate_residue(votes[r], classes.index(svm_classes[r]), ctx, draw);
            out.push_back(classes.label(cls));
        }
    }
    return opts.final_filter ? filter_structure(out, rules, classes) : out;
}

/// Aggregate a whole run: one structure string per protein, deterministic
/// given ctx.rng_seed.
inline std::vector<std::string> aggregate_run(
    const std::vector<std::vector<FuzzyVote>>& fknn_votes,
    const std::vector<std::string>& svm_classes, const AggregationContext& ctx,
    const FilterRuleSet& rules, const AggregationOptions& opts = {},
    const ClassAlphabet& classes = structure_classes()) {
    ctx.validate();
    if (fknn_votes.size() != svm_classes.size())
        throw ConfigError("aggregate_run: protein counts differ between classifiers");
    std::vector<std::string> out(fknn_votes.size());
    for (std::size_t p = 0; p < fknn_votes.size(); ++p)
        out[p] = aggregate_protein(fknn_votes[p], svm_classes[p], ctx, rules, opts,
                                   rng::derive_stream(ctx.rng_seed, p), classes);
    return out;
}

/// Wheel-2 sweep: for each breakpoint, aggregate the run `draws` times with
/// derived seeds and average the resulting Q3. Returns (breakpoint, Q3%)
/// pairs in input order.
inline std::vector<std::pair<double, double>> wheel2_sweep(
    const std::vector<std::vector<FuzzyVote>>& fknn_votes,
    const std::vector<std::string>& svm_classes, const std::vector<std::string>& truth,
    const std::vector<double>& breakpoints, int draws, std::uint64_t seed, int rule,
    const FilterRuleSet& rules, const AggregationOptions& opts = {},
    const ClassAlphabet& classes = structure_classes()) {
    if (breakpoints.empty()) throw ConfigError("wheel2_sweep: empty breakpoint list");
    if (draws < 1) throw ConfigError("wheel2_sweep: draws must be >= 1");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(breakpoints.size());
    for (const double b : breakpoints) {
        double acc = 0.0;
        for (int t = 0; t < draws; ++t) {
            auto ctx = make_context(rule, breakpoint_weights(b), rng::derive_stream(seed, t));
            const auto predicted = aggregate_run(fknn_votes, svm_classes, ctx, rules, opts, classes);
            acc += metrics(confusion(truth, predicted, classes)).q3;
        }
        curve.emplace_back(b, acc / draws);
    }
    return curve;
}

}  // namespace mcp
