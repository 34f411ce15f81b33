#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "mcp/model_io.hpp"
#include "support/synthetic.hpp"

using namespace mcp;

namespace {

TrainedModels toy_models() {
    testsupport::SyntheticSpec spec;
    spec.proteins = 6;
    spec.min_length = 25;
    spec.max_length = 35;
    const auto ds = testsupport::synthetic_corpus(2025, spec);
    RunConfig cfg;
    cfg.h = 9;
    cfg.k = 5;
    cfg.k_prime = 5;
    cfg.folds = 2;
    cfg.seed = 3;
    return train_models(ds, cfg);
}

}  // namespace

TEST_CASE("model container round trip") {
    const auto models = toy_models();
    const auto text = serialize_models(models);
    const auto loaded = deserialize_models(text);

    CHECK(loaded.config.h == models.config.h);
    CHECK(loaded.config.seed == models.config.seed);
    CHECK(loaded.weights.omega_fknn == models.weights.omega_fknn);
    REQUIRE(loaded.fknn.samples.size() == models.fknn.samples.size());
    for (std::size_t i = 0; i < loaded.fknn.samples.size(); ++i) {
        CHECK(loaded.fknn.samples[i].window == models.fknn.samples[i].window);
        CHECK(loaded.fknn.samples[i].center_label == models.fknn.samples[i].center_label);
        CHECK(loaded.fknn.initial_memberships[i] == models.fknn.initial_memberships[i]);
    }
    REQUIRE(loaded.svm.binaries.size() == models.svm.binaries.size());
    for (std::size_t b = 0; b < loaded.svm.binaries.size(); ++b) {
        CHECK(loaded.svm.binaries[b].alphas == models.svm.binaries[b].alphas);
        CHECK(loaded.svm.binaries[b].bias == models.svm.binaries[b].bias);
    }

    // The loaded model predicts identically.
    const std::string window = models.fknn.samples[3].window;
    CHECK(classify(loaded.fknn, window).memberships == classify(models.fknn, window).memberships);
    CHECK(predict_multiclass(loaded.svm, window) == predict_multiclass(models.svm, window));
}

TEST_CASE("serialization is deterministic with a stable content hash") {
    const auto a = serialize_models(toy_models());
    const auto b = serialize_models(toy_models());
    CHECK(a == b);
    const auto ja = nlohmann::json::parse(a);
    CHECK(ja.at("content_hash").get<std::string>().size() == 16);
}

TEST_CASE("malformed containers are rejected") {
    CHECK_THROWS_AS(deserialize_models("not json"), ParseError);
    CHECK_THROWS_AS(deserialize_models("{}"), ParseError);
    nlohmann::json j = nlohmann::json::parse(serialize_models(toy_models()));
    j["format_version"] = 999;
    CHECK_THROWS_AS(deserialize_models(j.dump()), ParseError);
}

TEST_CASE("fnv1a64 matches known vectors") {
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
    CHECK(fnv1a64("foobar") == 0x85944171F73967E8ULL);
}
