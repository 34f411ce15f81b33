// mcp: train, predict and evaluate the multi-component secondary-structure
// predictor from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcp/aggregate.hpp"
#include "mcp/evaluate.hpp"
#include "mcp/model_io.hpp"
#include "mcp/pipeline.hpp"

namespace {

// Exit codes: 0 success, 2 usage/config, 3 data, 4 convergence.
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;

struct CommonArgs {
    std::string data_path;
    std::string format = "paired";
    bool reduce_labels = false;
    std::string output_dir = "mcp-out";
    mcp::RunConfig config;
    std::string measure = "full";
};

mcp::DatasetFormat parse_format(const std::string& format) {
    if (format == "paired") return mcp::DatasetFormat::PairedLines;
    if (format == "fasta") return mcp::DatasetFormat::FastaLike;
    throw mcp::ConfigError("unknown dataset format '" + format + "'");
}

void apply_measure(mcp::RunConfig& config, const std::string& measure) {
    if (measure == "lz") {
        config.dissimilarity.use_rho = false;
        config.dissimilarity.use_ngram = false;
    } else if (measure == "lz+rho") {
        config.dissimilarity.use_rho = true;
        config.dissimilarity.use_ngram = false;
    } else if (measure == "full") {
        config.dissimilarity.use_rho = true;
        config.dissimilarity.use_ngram = true;
    } else {
        throw mcp::ConfigError("unknown measure '" + measure + "' (expected lz, lz+rho, full)");
    }
}

// Shared tunables; each appears on every subcommand so a config file can set
// any of them. Values also come from MCP_* environment variables.
void add_common_options(CLI::App* cmd, CommonArgs& args, bool needs_data) {
    auto* data = cmd->add_option("--data", args.data_path, "dataset file (paired-lines or FASTA)")
                     ->envname("MCP_DATA");
    if (needs_data) data->required();
    cmd->add_option("--format", args.format, "dataset format: paired | fasta")
        ->envname("MCP_FORMAT");
    cmd->add_flag("--reduce-labels", args.reduce_labels,
                  "reduce 8-state structure labels to 3 states while parsing");
    cmd->add_option("-o,--output", args.output_dir, "output directory")->envname("MCP_OUTPUT");
    cmd->add_option("--window-size", args.config.h, "sliding window size h (odd, >= 5)")
        ->envname("MCP_WINDOW_SIZE");
    cmd->add_option("--ngram-n", args.config.dissimilarity.n, "n-gram size (1 <= n < h)")
        ->envname("MCP_NGRAM_N");
    cmd->add_option("--measure", args.measure, "dissimilarity: lz | lz+rho | full")
        ->envname("MCP_MEASURE");
    cmd->add_option("--k", args.config.k, "FKNN neighbor count")->envname("MCP_K");
    cmd->add_option("--k-prime", args.config.k_prime, "FKNN initialization neighbor count")
        ->envname("MCP_K_PRIME");
    cmd->add_option("--fuzziness-m", args.config.m, "FKNN fuzziness exponent (> 1)")
        ->envname("MCP_FUZZINESS_M");
    cmd->add_option("--svm-c", args.config.svm_c, "SVM soft-margin C")->envname("MCP_SVM_C");
    cmd->add_option("--svm-gamma", args.config.svm_gamma, "edit kernel gamma (< 0)")
        ->envname("MCP_SVM_GAMMA");
    cmd->add_option("--svm-tol", args.config.svm_tol, "SMO KKT tolerance")->envname("MCP_SVM_TOL");
    cmd->add_flag("--spectrum-clip", args.config.spectrum_clip,
                  "clip negative kernel eigenvalues before SMO (small instances)");
    cmd->add_option("--aggregation", args.config.aggregation_rule, "aggregation rule 1..5")
        ->envname("MCP_AGGREGATION");
    cmd->add_option("--wheel", args.config.wheel, "roulette wheel strategy: 1 | 2")
        ->envname("MCP_WHEEL");
    cmd->add_option("--breakpoint", args.config.breakpoint,
                    "wheel-2 breakpoint assigning [0,b] to FKNN")
        ->envname("MCP_BREAKPOINT");
    cmd->add_option("--validation-fraction", args.config.validation_fraction,
                    "wheel-1 validation share of training proteins");
    cmd->add_option("--seed", args.config.seed, "master seed")->envname("MCP_SEED");
    cmd->add_option("--folds", args.config.folds, "cross-validation folds")->envname("MCP_FOLDS");
    cmd->add_option("--threads", args.config.threads, "worker threads (0 = hardware)")
        ->envname("MCP_THREADS");

    bool no_filter = false;
    cmd->add_flag("--no-filter", no_filter, "disable all biological filtering")
        ->each([&args](const std::string&) {
            args.config.final_filter = false;
            args.config.rule5_stream_filter = false;
        });
    cmd->add_option("--post-filter", args.config.rule5_stream_filter,
                    "rule-5 extra stream filtration (default on)");
}

mcp::Dataset load_dataset(const CommonArgs& args) {
    return mcp::parse_dataset(args.data_path, parse_format(args.format), args.reduce_labels);
}

void finalize_config(CommonArgs& args) {
    apply_measure(args.config, args.measure);
    args.config.validate();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw mcp::ParseError("cannot write '" + path.string() + "'");
    out << text;
}

nlohmann::json report_to_json(const mcp::MetricReport& report, const mcp::ConfusionMatrix& cm) {
    nlohmann::json per_class;
    for (int c = 0; c < cm.classes.size(); ++c) {
        const auto& m = report.per_class[static_cast<std::size_t>(c)];
        per_class[std::string(1, cm.classes.label(c))] = {{"precision", m.precision},
                                                          {"recall", m.recall},
                                                          {"q", m.recall},
                                                          {"specificity", m.specificity},
                                                          {"mcc", m.mcc}};
    }
    return {{"q3", report.q3},
            {"overall_accuracy_paper", report.overall_accuracy_paper},
            {"per_class", per_class},
            {"confusion", cm.counts}};
}

void print_report(std::ostream& out, const std::string& title, const mcp::MetricReport& report,
                  const mcp::ConfusionMatrix& cm) {
    out << title << ": Q3 = " << report.q3 << "%\n";
    out << "  class   precision   recall  specificity      MCC\n";
    for (int c = 0; c < cm.classes.size(); ++c) {
        const auto& m = report.per_class[static_cast<std::size_t>(c)];
        char line[128];
        std::snprintf(line, sizeof line, "  %c     %9.2f %9.2f %12.2f %8.3f\n",
                      cm.classes.label(c), m.precision, m.recall, m.specificity, m.mcc);
        out << line;
    }
}

int cmd_train(CommonArgs& args) {
    finalize_config(args);
    const auto dataset = load_dataset(args);
    const auto models = mcp::train_models(dataset, args.config);

    std::filesystem::create_directories(args.output_dir);
    const auto model_path = std::filesystem::path(args.output_dir) / "model.json";
    const std::string serialized = mcp::serialize_models(models);
    write_text(model_path, serialized);

    nlohmann::json manifest = {
        {"model_file", "model.json"},
        {"content_hash", nlohmann::json::parse(serialized).at("content_hash")},
        {"dataset", {{"name", dataset.name},
                     {"proteins", dataset.records.size()},
                     {"residues", dataset.residue_count}}},
        {"config", mcp::config_to_json(args.config)}};
    write_text(std::filesystem::path(args.output_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "trained on " << dataset.records.size() << " proteins ("
              << dataset.residue_count << " residues); model written to " << model_path.string()
              << "\n";
    return 0;
}

int cmd_predict(CommonArgs& args, const std::string& model_path,
                const std::string& sequence_path) {
    auto models = mcp::load_models(model_path);
    // Command-line overrides that conflict with the trained model are errors.
    if (args.config.h != models.config.h)
        throw mcp::ConfigError("window size " + std::to_string(args.config.h) +
                               " does not match the model's h=" + std::to_string(models.config.h));
    models.config.aggregation_rule = args.config.aggregation_rule;
    models.config.seed = args.config.seed;
    models.config.final_filter = args.config.final_filter;
    models.config.rule5_stream_filter = args.config.rule5_stream_filter;
    models.config.threads = args.config.threads;
    if (models.weights.source == mcp::ClassifierWeights::Source::Wheel2Breakpoint)
        models.weights = mcp::breakpoint_weights(args.config.breakpoint);

    const auto records = mcp::parse_sequences(sequence_path);
    const auto run = mcp::predict_run(models, records);

    std::filesystem::create_directories(args.output_dir);
    nlohmann::json out_proteins = nlohmann::json::array();
    const auto& classes = models.fknn.classes;
    for (const auto& p : run.proteins) {
        std::cout << ">" << p.id << "\n";
        std::cout << "pos\tres\t";
        for (int c = 0; c < classes.size(); ++c) std::cout << "U_" << classes.label(c) << "\t";
        std::cout << "fknn\tsvm\tfinal\n";
        nlohmann::json memberships = nlohmann::json::array();
        std::string fknn_decisions;
        for (std::size_t r = 0; r < p.votes.size(); ++r) {
            const auto& v = p.votes[r];
            fknn_decisions.push_back(classes.label(v.first()));
            memberships.push_back(v.memberships);
            std::cout << r << "\t" << p.sequence[r] << "\t";
            for (double u : v.memberships) {
                char buf[16];
                std::snprintf(buf, sizeof buf, "%.4f\t", u);
                std::cout << buf;
            }
            std::cout << classes.label(v.first()) << "\t" << p.svm_classes[r] << "\t"
                      << p.final_structure[r] << "\n";
        }
        out_proteins.push_back({{"id", p.id},
                                {"sequence", p.sequence},
                                {"memberships", std::move(memberships)},
                                {"fknn", fknn_decisions},
                                {"svm", p.svm_classes},
                                {"aggregated", p.aggregated},
                                {"final", p.final_structure}});
    }
    nlohmann::json out = {{"model", model_path},
                          {"aggregation_rule", models.config.aggregation_rule},
                          {"proteins", std::move(out_proteins)}};
    write_text(std::filesystem::path(args.output_dir) / "predictions.json", out.dump(2) + "\n");
    return 0;
}

int cmd_evaluate(CommonArgs& args, const std::string& test_path) {
    finalize_config(args);
    const auto dataset = load_dataset(args);
    std::filesystem::create_directories(args.output_dir);
    nlohmann::json out;
    out["config"] = mcp::config_to_json(args.config);
    if (!test_path.empty()) {
        const auto test = mcp::parse_dataset(test_path, parse_format(args.format),
                                             args.reduce_labels);
        const auto result = mcp::independent_test(dataset, test, args.config);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        print_report(std::cout, "independent test", result.report, result.cm);
        out["independent_test"] = report_to_json(result.report, result.cm);
        out["warnings"] = result.warnings;
    } else {
        const auto result = mcp::kfold(dataset, args.config.folds, args.config);
        nlohmann::json folds = nlohmann::json::array();
        for (std::size_t f = 0; f < result.folds.size(); ++f) {
            print_report(std::cout, "fold " + std::to_string(f), result.folds[f].report,
                         result.folds[f].cm);
            auto fold_json = report_to_json(result.folds[f].report, result.folds[f].cm);
            fold_json["test_proteins"] = result.folds[f].test_proteins;
            folds.push_back(std::move(fold_json));
        }
        print_report(std::cout, "pooled", result.pooled, result.pooled_cm);
        out["folds"] = std::move(folds);
        out["pooled"] = report_to_json(result.pooled, result.pooled_cm);
    }
    write_text(std::filesystem::path(args.output_dir) / "metrics.json", out.dump(2) + "\n");
    return 0;
}

int cmd_ablate(CommonArgs& args) {
    finalize_config(args);
    const auto dataset = load_dataset(args);
    const auto assignment =
        mcp::fold_assignment(dataset.records.size(), args.config.folds, args.config.seed);
    const auto rules = mcp::FilterRuleSet::biological();

    const std::vector<std::string> row_labels = {
        "FKNN+LZ", "FKNN+LZ+rho", "FKNN+LZ+rho+ngram", "Edit-SVM",
        "MCP1", "MCP2", "MCP3", "MCP4", "MCP5"};
    std::vector<mcp::ConfusionMatrix> row_cms(row_labels.size());

    for (std::size_t f = 0; f < assignment.size(); ++f) {
        std::set<std::size_t> test_set(assignment[f].begin(), assignment[f].end());
        mcp::Dataset train;
        std::vector<mcp::ProteinRecord> test_records;
        for (std::size_t i = 0; i < dataset.records.size(); ++i) {
            if (test_set.count(i)) test_records.push_back(dataset.records[i]);
            else {
                train.records.push_back(dataset.records[i]);
                train.residue_count += dataset.records[i].length();
            }
        }

        // Measure ablations retrain the fuzzy classifier per variant.
        for (int variant = 0; variant < 3; ++variant) {
            mcp::RunConfig cfg = args.config;
            cfg.dissimilarity.use_rho = variant >= 1;
            cfg.dissimilarity.use_ngram = variant >= 2;
            auto windows = mcp::labeled_windows(train.records, cfg.h);
            const auto fknn = mcp::train_fknn(windows, cfg.h, cfg.k, cfg.k_prime, cfg.m,
                                              cfg.dissimilarity, mcp::structure_classes(),
                                              cfg.threads);
            for (const auto& rec : test_records) {
                const auto votes = mcp::predict_sequence(fknn, rec, cfg.h, cfg.threads);
                std::string s;
                for (const auto& v : votes) s.push_back(fknn.classes.label(v.first()));
                if (cfg.final_filter) s = mcp::filter_structure(s, rules);
                for (std::size_t r = 0; r < s.size(); ++r)
                    row_cms[static_cast<std::size_t>(variant)].add(rec.structure[r], s[r]);
            }
        }

        // Full models; the five MCP rows re-aggregate one classification pass.
        const auto models = mcp::train_models(train, args.config);
        auto run = mcp::predict_classifiers(models, test_records);
        for (std::size_t p = 0; p < run.proteins.size(); ++p) {
            std::string s = run.proteins[p].svm_classes;
            if (args.config.final_filter) s = mcp::filter_structure(s, rules);
            for (std::size_t r = 0; r < s.size(); ++r)
                row_cms[3].add(run.proteins[p].truth[r], s[r]);
        }
        for (int rule = 1; rule <= 5; ++rule) {
            mcp::apply_aggregation(run, models, rule);
            for (const auto& p : run.proteins)
                for (std::size_t r = 0; r < p.final_structure.size(); ++r)
                    row_cms[static_cast<std::size_t>(3 + rule)].add(p.truth[r],
                                                                    p.final_structure[r]);
        }
    }

    std::filesystem::create_directories(args.output_dir);
    nlohmann::json rows = nlohmann::json::array();
    std::cout << "method\tQ3\n";
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        const auto report = mcp::metrics(row_cms[i]);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f", report.q3);
        std::cout << row_labels[i] << "\t" << buf << "\n";
        rows.push_back({{"method", row_labels[i]}, {"q3", report.q3}});
    }
    nlohmann::json out = {{"config", mcp::config_to_json(args.config)}, {"rows", std::move(rows)}};
    write_text(std::filesystem::path(args.output_dir) / "ablation.json", out.dump(2) + "\n");
    return 0;
}

int cmd_sweep(CommonArgs& args, const std::string& sweep_spec, int draws,
              const std::string& test_path) {
    finalize_config(args);
    double start = 0.1, stop = 0.9, step = 0.1;
    if (!sweep_spec.empty()) {
        if (std::sscanf(sweep_spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
            step <= 0.0)
            throw mcp::ConfigError("--breakpoint-sweep expects start:stop:step");
    }
    std::vector<double> breakpoints;
    for (double b = start; b <= stop + 1e-12; b += step) breakpoints.push_back(b);

    const auto dataset = load_dataset(args);
    mcp::Dataset train;
    std::vector<mcp::ProteinRecord> test_records;
    if (!test_path.empty()) {
        train = dataset;
        test_records = mcp::parse_dataset(test_path, parse_format(args.format),
                                          args.reduce_labels).records;
    } else {
        // Hold out the first fold of the configured split.
        const auto assignment =
            mcp::fold_assignment(dataset.records.size(), args.config.folds, args.config.seed);
        std::set<std::size_t> test_set(assignment[0].begin(), assignment[0].end());
        for (std::size_t i = 0; i < dataset.records.size(); ++i) {
            if (test_set.count(i)) test_records.push_back(dataset.records[i]);
            else {
                train.records.push_back(dataset.records[i]);
                train.residue_count += dataset.records[i].length();
            }
        }
    }

    const auto models = mcp::train_models(train, args.config);
    const auto run = mcp::predict_classifiers(models, test_records);
    const int rule = args.config.aggregation_rule == 1 || args.config.aggregation_rule == 3
                         ? 2
                         : args.config.aggregation_rule;
    const auto curve = mcp::wheel2_sweep(run.vote_streams(), run.svm_streams(),
                                         run.truth_streams(), breakpoints, draws,
                                         args.config.seed, rule, mcp::FilterRuleSet::biological(),
                                         args.config.aggregation_options());

    std::size_t argmax = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].second > curve[argmax].second) argmax = i;

    std::filesystem::create_directories(args.output_dir);
    std::ostringstream text;
    std::cout << "breakpoint\tQ3\n";
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f\t%.4f", curve[i].first, curve[i].second);
        std::cout << buf << (i == argmax ? "\t<-- argmax" : "") << "\n";
        text << buf << (i == argmax ? "\targmax" : "") << "\n";
        points.push_back({{"breakpoint", curve[i].first}, {"q3", curve[i].second}});
    }
    write_text(std::filesystem::path(args.output_dir) / "sweep.txt", text.str());
    nlohmann::json out = {{"draws", draws},
                          {"rule", rule},
                          {"argmax_breakpoint", curve[argmax].first},
                          {"points", std::move(points)},
                          {"config", mcp::config_to_json(args.config)}};
    write_text(std::filesystem::path(args.output_dir) / "sweep.json", out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MCP protein secondary structure predictor"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a config file");

    CommonArgs train_args, predict_args, evaluate_args, ablate_args, sweep_args;
    std::string model_path, sequence_path, test_path, sweep_spec;
    int draws = 1;

    auto* train = app.add_subcommand("train", "train FKNN and edit-SVM models");
    add_common_options(train, train_args, true);

    auto* predict = app.add_subcommand("predict", "predict structures for FASTA sequences");
    add_common_options(predict, predict_args, false);
    predict->add_option("--model", model_path, "model container from `mcp train`")->required();
    predict->add_option("--sequences", sequence_path, "FASTA file of sequences")->required();

    auto* evaluate = app.add_subcommand("evaluate",
                                        "cross-validate on one dataset or test on another");
    add_common_options(evaluate, evaluate_args, true);
    evaluate->add_option("--test-set", test_path, "independent test dataset");

    auto* ablate = app.add_subcommand("ablate", "measure and aggregation-rule ablation table");
    add_common_options(ablate, ablate_args, true);

    auto* sweep = app.add_subcommand("sweep-breakpoint", "wheel-2 breakpoint accuracy curve");
    add_common_options(sweep, sweep_args, true);
    sweep->add_option("--breakpoint-sweep", sweep_spec, "start:stop:step (default 0.1:0.9:0.1)");
    sweep->add_option("--draws", draws, "random passes averaged per breakpoint")
        ->envname("MCP_DRAWS");
    sweep->add_option("--sweep-test-set", test_path, "evaluate the sweep on this dataset");

    try {
        app.parse(argc, argv);
        if (train->parsed()) return cmd_train(train_args);
        if (predict->parsed()) return cmd_predict(predict_args, model_path, sequence_path);
        if (evaluate->parsed()) return cmd_evaluate(evaluate_args, test_path);
        if (ablate->parsed()) return cmd_ablate(ablate_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_spec, draws, test_path);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    } catch (const mcp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mcp::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const mcp::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
