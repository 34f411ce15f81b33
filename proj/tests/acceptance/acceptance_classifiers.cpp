// Criteria 4, 6, 7 and 11: fuzzy-vote invariants, the SMO dual check against
// the projected-gradient reference, aggregation agreement dominance and the
// metrics fuzz suite.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mcp/aggregate.hpp"
#include "mcp/fknn.hpp"
#include "mcp/metrics.hpp"
#include "mcp/rng.hpp"
#include "mcp/svm.hpp"
#include "../support/oracles.hpp"

using namespace mcp;

TEST_CASE("criterion 04: fuzzy invariants over 10^4 random configurations") {
    SeededRng rng(0xACCE04);
    for (int it = 0; it < 10000; ++it) {
        const std::size_t n = 2 + rng.next_below(24);
        const int k = 1 + static_cast<int>(rng.next_below(n));
        const int kp = 1 + static_cast<int>(rng.next_below(12));
        const double m = 1.2 + rng.next_uniform() * 3.0;

        std::vector<double> d(n);
        std::vector<std::vector<double>> rows(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = 0.01 + rng.next_uniform() * 8.0;
            std::array<int, 3> counts{};
            int left = kp;
            counts[0] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(left) + 1));
            left -= counts[0];
            counts[1] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(left) + 1));
            counts[2] = left - counts[1];
            rows[i] = initial_membership_row(static_cast<int>(rng.next_below(3)), counts, kp, 3);
            double row_sum = 0.0;
            for (double v : rows[i]) row_sum += v;
            REQUIRE(std::abs(row_sum - 1.0) < 1e-9);
        }

        const auto base = fuzzy_vote(d, rows, k, m);
        double sum = 0.0;
        for (double u : base.memberships) {
            REQUIRE(u >= -1e-12);
            REQUIRE(u <= 1.0 + 1e-12);
            sum += u;
        }
        REQUIRE(std::abs(sum - 1.0) < 1e-9);

        for (const double lambda : {0.1, 10.0}) {
            auto scaled = d;
            for (auto& x : scaled) x *= lambda;
            const auto v = fuzzy_vote(scaled, rows, k, m);
            for (std::size_t c = 0; c < 3; ++c)
                REQUIRE(std::abs(v.memberships[c] - base.memberships[c]) < 1e-9);
        }
    }
}

TEST_CASE("criterion 06: SMO dual matches a dense projected-gradient oracle") {
    SeededRng rng(0xACCE06);
    int checked = 0;
    while (checked < 5) {
        const std::size_t n = 20;
        std::vector<WindowSample> samples;
        bool has_h = false, has_e = false;
        for (std::size_t i = 0; i < n; ++i) {
            WindowSample s;
            s.window = testsupport::random_string(rng, 5 + rng.next_below(5));
            s.center_label = rng.next_below(2) == 0 ? 'H' : 'E';
            s.protein_id = "toy";
            s.position = i;
            (s.center_label == 'H' ? has_h : has_e) = true;
            samples.push_back(std::move(s));
        }
        if (!has_h || !has_e) continue;
        ++checked;

        SvmTrainOptions opts;
        opts.params.gamma = -0.5;
        opts.C = 2.0;
        opts.tol = 1e-6;
        opts.spectrum_clip = true;  // both solvers see the identical PSD matrix
        const auto model = train_binary(samples, 'H', 'E', opts);

        double alpha_dot_y = 0.0;
        for (std::size_t i = 0; i < model.alphas.size(); ++i) {
            REQUIRE(model.alphas[i] >= 0.0);
            REQUIRE(model.alphas[i] <= opts.C + 1e-12);
            alpha_dot_y +=
                model.alphas[i] * (model.support_labels[i] == 'H' ? 1.0 : -1.0);
        }
        REQUIRE(std::abs(alpha_dot_y) < 1e-6);

        std::vector<double> kernel(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                kernel[i * n + j] =
                    edit_kernel(samples[i].window, samples[j].window, opts.params);
        clip_spectrum(kernel, static_cast<int>(n));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = samples[i].center_label == 'H' ? 1.0 : -1.0;
        std::vector<std::vector<double>> Q(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) Q[i][j] = y[i] * y[j] * kernel[i * n + j];
        const double reference = testsupport::qp_reference_dual(Q, y, opts.C);

        std::vector<double> alpha(n, 0.0);
        std::size_t support = 0;
        for (std::size_t i = 0; i < n && support < model.alphas.size(); ++i) {
            if (model.support_windows[support] == samples[i].window &&
                model.support_labels[support] == samples[i].center_label) {
                alpha[i] = model.alphas[support];
                ++support;
            }
        }
        REQUIRE(support == model.alphas.size());
        double smo_dual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            smo_dual += alpha[i];
            for (std::size_t j = 0; j < n; ++j)
                smo_dual -= 0.5 * alpha[i] * alpha[j] * Q[i][j];
        }
        REQUIRE(std::abs(smo_dual - reference) < 1e-4);
    }
}

TEST_CASE("criterion 07: agreement dominance over 10^5 fuzzed triples") {
    SeededRng rng(0xACCE07);
    for (int it = 0; it < 100000; ++it) {
        std::vector<double> m = {rng.next_uniform(), rng.next_uniform(), rng.next_uniform()};
        const double total = m[0] + m[1] + m[2] + 1e-12;
        for (auto& x : m) x /= total;
        const auto vote = FuzzyVote::from_memberships(std::move(m));
        const int svm = static_cast<int>(rng.next_below(3));
        const int rule = 1 + static_cast<int>(rng.next_below(5));
        const auto ctx =
            rule == 1 || rule == 3
                ? make_context(rule, 1)
                : make_context(rule, breakpoint_weights(0.05 + 0.9 * rng.next_uniform()), 1);
        const int out = aggregate_residue(vote, svm, ctx, rng.next_uniform());
        if (vote.first() == svm) REQUIRE(out == svm);
    }
}

TEST_CASE("criterion 11: metrics suite") {
    // Perfect prediction.
    const auto perfect = metrics(confusion({"HHHEEECCC"}, {"HHHEEECCC"}));
    REQUIRE(perfect.q3 == 100.0);
    for (const auto& m : perfect.per_class) REQUIRE(m.mcc == 1.0);

    // Hand-computed fixed matrix.
    ConfusionMatrix cm;
    cm.counts = {{5, 1, 0}, {2, 6, 0}, {0, 0, 6}};
    const auto report = metrics(cm);
    REQUIRE(report.q3 == 100.0 * 17.0 / 20.0);
    REQUIRE(report.per_class[0].precision == 100.0 * 5.0 / 7.0);
    REQUIRE(report.per_class[0].recall == 100.0 * 5.0 / 6.0);
    REQUIRE(report.per_class[0].specificity == 100.0 * 12.0 / 14.0);
    REQUIRE(report.per_class[0].mcc ==
            Catch::Approx((5.0 * 12 - 2.0) / std::sqrt(7.0 * 6.0 * 14.0 * 13.0)).epsilon(1e-12));
    REQUIRE(report.per_class[1].mcc ==
            Catch::Approx((6.0 * 11 - 2.0) / std::sqrt(7.0 * 8.0 * 12.0 * 13.0)).epsilon(1e-12));
    REQUIRE(report.per_class[2].mcc == 1.0);

    // MCC bounded over 10^5 random confusion matrices.
    SeededRng rng(0xACCE11);
    for (int it = 0; it < 100000; ++it) {
        ConfusionMatrix random_cm;
        long long total = 0;
        for (auto& row : random_cm.counts)
            for (auto& v : row) {
                v = static_cast<long long>(rng.next_below(100));
                total += v;
            }
        if (total == 0) continue;
        const auto r = metrics(random_cm);
        for (const auto& m : r.per_class) {
            REQUIRE(m.mcc >= -1.0 - 1e-12);
            REQUIRE(m.mcc <= 1.0 + 1e-12);
        }
    }
}
