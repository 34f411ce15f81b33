#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "mcp/error.hpp"
#include "mcp/pipeline.hpp"

namespace mcp {

inline constexpr int kModelFormatVersion = 1;

/// FNV-1a 64-bit digest used as the model content hash.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    return {{"h", c.h},
            {"ngram_n", c.dissimilarity.n},
            {"use_rho", c.dissimilarity.use_rho},
            {"use_ngram", c.dissimilarity.use_ngram},
            {"k", c.k},
            {"k_prime", c.k_prime},
            {"m", c.m},
            {"svm_c", c.svm_c},
            {"svm_gamma", c.svm_gamma},
            {"svm_tol", c.svm_tol},
            {"svm_max_iterations", c.svm_max_iterations},
            {"spectrum_clip", c.spectrum_clip},
            {"aggregation_rule", c.aggregation_rule},
            {"wheel", c.wheel},
            {"breakpoint", c.breakpoint},
            {"validation_fraction", c.validation_fraction},
            {"final_filter", c.final_filter},
            {"rule5_stream_filter", c.rule5_stream_filter},
            {"seed", c.seed},
            {"folds", c.folds}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.h = j.at("h");
    c.dissimilarity.n = j.at("ngram_n");
    c.dissimilarity.use_rho = j.at("use_rho");
    c.dissimilarity.use_ngram = j.at("use_ngram");
    c.k = j.at("k");
    c.k_prime = j.at("k_prime");
    c.m = j.at("m");
    c.svm_c = j.at("svm_c");
    c.svm_gamma = j.at("svm_gamma");
    c.svm_tol = j.at("svm_tol");
    c.svm_max_iterations = j.at("svm_max_iterations");
    c.spectrum_clip = j.at("spectrum_clip");
    c.aggregation_rule = j.at("aggregation_rule");
    c.wheel = j.at("wheel");
    c.breakpoint = j.at("breakpoint");
    c.validation_fraction = j.at("validation_fraction");
    c.final_filter = j.at("final_filter");
    c.rule5_stream_filter = j.at("rule5_stream_filter");
    c.seed = j.at("seed");
    c.folds = j.at("folds");
    return c;
}

/// Serialize trained models to the versioned JSON container (schema in the
/// README). The "content_hash" field digests the container with the hash
/// field itself blanked.
inline std::string serialize_models(const TrainedModels& models) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["classes"] = models.fknn.classes.classes;
    j["config"] = config_to_json(models.config);
    j["weights"] = {{"omega_fknn", models.weights.omega_fknn},
                    {"omega_svm", models.weights.omega_svm},
                    {"source", models.weights.source == ClassifierWeights::Source::Wheel1
                                   ? "wheel1"
                                   : "wheel2-breakpoint"}};

    nlohmann::json fknn;
    fknn["h"] = models.fknn.h;
    fknn["k"] = models.fknn.k;
    fknn["k_prime"] = models.fknn.k_prime;
    fknn["m"] = models.fknn.m;
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t i = 0; i < models.fknn.samples.size(); ++i) {
        const auto& s = models.fknn.samples[i];
        samples.push_back({{"protein", s.protein_id},
                           {"position", s.position},
                           {"window", s.window},
                           {"label", std::string(1, s.center_label)},
                           {"memberships", models.fknn.initial_memberships[i]}});
    }
    fknn["samples"] = std::move(samples);
    j["fknn"] = std::move(fknn);

    nlohmann::json binaries = nlohmann::json::array();
    for (const auto& bin : models.svm.binaries) {
        nlohmann::json b;
        b["positive"] = std::string(1, bin.positive_label);
        b["negative"] = std::string(1, bin.negative_label);
        b["bias"] = bin.bias;
        b["gamma"] = bin.params.gamma;
        b["C"] = bin.C;
        nlohmann::json support = nlohmann::json::array();
        for (std::size_t s = 0; s < bin.support_windows.size(); ++s)
            support.push_back({{"window", bin.support_windows[s]},
                               {"label", std::string(1, bin.support_labels[s])},
                               {"alpha", bin.alphas[s]}});
        b["support"] = std::move(support);
        binaries.push_back(std::move(b));
    }
    j["svm"] = {{"binaries", std::move(binaries)}};

    j["content_hash"] = "";
    const std::uint64_t digest = fnv1a64(j.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    j["content_hash"] = buf;
    return j.dump(2);
}

inline TrainedModels deserialize_models(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model container: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion)
            throw ParseError("model container: unsupported format version");
        TrainedModels models;
        models.config = config_from_json(j.at("config"));
        ClassAlphabet classes;
        classes.classes = j.at("classes").get<std::string>();

        const auto& w = j.at("weights");
        models.weights.omega_fknn = w.at("omega_fknn");
        models.weights.omega_svm = w.at("omega_svm");
        models.weights.source = w.at("source") == "wheel1"
                                    ? ClassifierWeights::Source::Wheel1
                                    : ClassifierWeights::Source::Wheel2Breakpoint;

        const auto& f = j.at("fknn");
        models.fknn.h = f.at("h");
        models.fknn.k = f.at("k");
        models.fknn.k_prime = f.at("k_prime");
        models.fknn.m = f.at("m");
        models.fknn.cfg = models.config.dissimilarity;
        models.fknn.classes = classes;
        for (const auto& s : f.at("samples")) {
            WindowSample sample;
            sample.protein_id = s.at("protein");
            sample.position = s.at("position");
            sample.window = s.at("window");
            sample.center_label = s.at("label").get<std::string>().at(0);
            models.fknn.samples.push_back(sample);
            models.fknn.initial_memberships.push_back(
                s.at("memberships").get<std::vector<double>>());
            models.fknn.profiles.emplace_back(sample.window, models.fknn.cfg);
        }

        models.svm.classes = classes;
        models.svm.h = models.config.h;
        for (const auto& b : j.at("svm").at("binaries")) {
            BinarySvmModel bin;
            bin.positive_label = b.at("positive").get<std::string>().at(0);
            bin.negative_label = b.at("negative").get<std::string>().at(0);
            bin.bias = b.at("bias");
            bin.params.gamma = b.at("gamma");
            bin.C = b.at("C");
            for (const auto& s : b.at("support")) {
                bin.support_windows.push_back(s.at("window"));
                bin.support_labels.push_back(s.at("label").get<std::string>().at(0));
                bin.alphas.push_back(s.at("alpha"));
            }
            models.svm.binaries.push_back(std::move(bin));
        }
        return models;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model container: missing or mistyped field: ") + e.what());
    }
}

inline void save_models(const std::string& path, const TrainedModels& models) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write model file '" + path + "'");
    out << serialize_models(models);
}

inline TrainedModels load_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_models(text);
}

}  // namespace mcp
