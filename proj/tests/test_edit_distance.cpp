#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "mcp/dissimilarity.hpp"
#include "support/oracles.hpp"

using namespace mcp;

TEST_CASE("edit distance basics") {
    CHECK(edit_distance("AAB", "AAB") == 0);
    CHECK(edit_distance("", "HEC") == 3);
    CHECK(edit_distance("HEC", "") == 3);
    CHECK(edit_distance("", "") == 0);
    CHECK(edit_distance("kitten", "sitting") == 3);
}

TEST_CASE("edit distance against the recursive definition") {
    SeededRng rng(4444);
    for (int it = 0; it < 600; ++it) {
        const auto a = testsupport::random_string(rng, rng.next_below(8), "ACD");
        const auto b = testsupport::random_string(rng, rng.next_below(8), "ACD");
        CHECK(edit_distance(a, b) == testsupport::edit_distance_recursive(a, b));
        CHECK(edit_distance(a, b) == edit_distance(b, a));
    }
}

TEST_CASE("edit distance is a metric on the small-string set") {
    // All strings of length <= 3 over a 3-letter alphabet.
    std::vector<std::string> all{""};
    const std::string letters = "ACD";
    for (int len = 1; len <= 3; ++len) {
        const int count = static_cast<int>(std::pow(3, len));
        for (int v = 0; v < count; ++v) {
            std::string s;
            int x = v;
            for (int k = 0; k < len; ++k) {
                s.push_back(letters[static_cast<std::size_t>(x % 3)]);
                x /= 3;
            }
            all.push_back(std::move(s));
        }
    }
    const std::size_t n = all.size();
    std::vector<std::vector<int>> d(n, std::vector<int>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = edit_distance(all[i], all[j]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            CHECK((d[i][j] == 0) == (all[i] == all[j]));
            for (std::size_t k = 0; k < n; ++k) REQUIRE(d[i][j] <= d[i][k] + d[k][j]);
        }
}
