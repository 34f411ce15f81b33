// End-to-end exercises of the mcp binary. The binary path is injected by the
// build as MCP_CLI_PATH.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mcp/ingest.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct Workdir {
    fs::path root;
    Workdir() {
        root = fs::temp_directory_path() /
               ("mcp_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(root);
    }
    ~Workdir() { fs::remove_all(root); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(MCP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args, const fs::path& out_file) {
    const std::string cmd =
        std::string(MCP_CLI_PATH) + " " + args + " >" + out_file.string() + " 2>&1";
    std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_corpus(const Workdir& wd, int proteins, const std::string& name) {
    testsupport::SyntheticSpec spec;
    spec.proteins = proteins;
    spec.min_length = 25;
    spec.max_length = 40;
    const auto ds = testsupport::synthetic_corpus(777, spec);
    const auto path = wd.root / name;
    mcp::write_dataset(path.string(), ds);
    return path;
}

const std::string kFastArgs = " --window-size 9 --k 5 --k-prime 5 --folds 2 --seed 4";

}  // namespace

TEST_CASE("cli usage and data errors use distinct exit codes") {
    Workdir wd;
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("train") == 2);                                  // missing --data
    CHECK(run("train --data /nonexistent.txt" + kFastArgs) == 3);
    CHECK(run("train --data /nonexistent.txt --window-size 4") == 2);

    const auto bad = wd.root / "bad.txt";
    std::ofstream(bad.string()) << ">p1\nAAC\nHH\n";  // length mismatch
    CHECK(run("train --data " + bad.string() + kFastArgs) == 3);
}

TEST_CASE("train, predict and evaluate round trip") {
    Workdir wd;
    const auto data = write_corpus(wd, 8, "corpus.txt");
    const auto out1 = wd.root / "run1";
    const auto out2 = wd.root / "run2";

    REQUIRE(run("train --data " + data.string() + kFastArgs + " -o " + out1.string()) == 0);
    REQUIRE(fs::exists(out1 / "model.json"));
    REQUIRE(fs::exists(out1 / "manifest.json"));

    // Reproducibility: identical config and seed give identical hashes.
    REQUIRE(run("train --data " + data.string() + kFastArgs + " -o " + out2.string()) == 0);
    const auto manifest1 = nlohmann::json::parse(std::ifstream((out1 / "manifest.json").string()));
    const auto manifest2 = nlohmann::json::parse(std::ifstream((out2 / "manifest.json").string()));
    CHECK(manifest1.at("content_hash") == manifest2.at("content_hash"));

    // Predict on a FASTA of sequences.
    const auto ds = mcp::parse_dataset(data.string(), mcp::DatasetFormat::PairedLines);
    const auto fasta = wd.root / "query.fa";
    std::ofstream(fasta.string()) << ">q0\n" << ds.records[0].sequence << "\n";
    const auto pred_out = wd.root / "pred";
    REQUIRE(run("predict --model " + (out1 / "model.json").string() + " --sequences " +
                fasta.string() + " --window-size 9 -o " + pred_out.string()) == 0);
    const auto predictions =
        nlohmann::json::parse(std::ifstream((pred_out / "predictions.json").string()));
    REQUIRE(predictions.at("proteins").size() == 1);
    const std::string final_structure = predictions.at("proteins")[0].at("final");
    CHECK(final_structure.size() == ds.records[0].sequence.size());

    // Window-size mismatch against the model is a usage error.
    CHECK(run("predict --model " + (out1 / "model.json").string() + " --sequences " +
              fasta.string() + " --window-size 11 -o " + pred_out.string()) == 2);

    // Cross-validated evaluation emits a metrics report.
    const auto eval_out = wd.root / "eval";
    REQUIRE(run("evaluate --data " + data.string() + kFastArgs + " -o " +
                eval_out.string()) == 0);
    const auto metrics =
        nlohmann::json::parse(std::ifstream((eval_out / "metrics.json").string()));
    CHECK(metrics.contains("pooled"));
    CHECK(metrics.at("folds").size() == 2);
}

TEST_CASE("ablate emits the nine-row table") {
    Workdir wd;
    const auto data = write_corpus(wd, 6, "corpus.txt");
    const auto out = wd.root / "ablate";
    REQUIRE(run("ablate --data " + data.string() + kFastArgs + " -o " + out.string()) == 0);
    const auto table = nlohmann::json::parse(std::ifstream((out / "ablation.json").string()));
    REQUIRE(table.at("rows").size() == 9);
    CHECK(table.at("rows")[0].at("method") == "FKNN+LZ");
    CHECK(table.at("rows")[8].at("method") == "MCP5");

    const auto again = wd.root / "ablate2";
    REQUIRE(run("ablate --data " + data.string() + kFastArgs + " -o " + again.string()) == 0);
    const auto table2 = nlohmann::json::parse(std::ifstream((again / "ablation.json").string()));
    CHECK(table == table2);
}

TEST_CASE("breakpoint sweep marks the argmax") {
    Workdir wd;
    const auto data = write_corpus(wd, 6, "corpus.txt");
    const auto out = wd.root / "sweep";
    const auto text = run_capture("sweep-breakpoint --data " + data.string() + kFastArgs +
                                      " --breakpoint-sweep 0.05:0.95:0.05 --draws 3 -o " +
                                      out.string(),
                                  wd.root / "sweep_stdout.txt");
    CHECK(text.find("argmax") != std::string::npos);
    const auto curve = nlohmann::json::parse(std::ifstream((out / "sweep.json").string()));
    CHECK(curve.at("points").size() == 19);
    CHECK(curve.contains("argmax_breakpoint"));
    REQUIRE(fs::exists(out / "sweep.txt"));
}
