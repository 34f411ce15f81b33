#pragma once

#include <algorithm>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "mcp/error.hpp"
#include "mcp/ratio.hpp"

namespace mcp {

// Lempel-Ziv exhaustive history.
//
// The string is decomposed left to right. A candidate fragment keeps growing
// while it can be reproduced by copying consecutive, complete, earlier
// fragments; the first extension that cannot be reproduced closes the
// fragment. A candidate that reaches the final character is emitted as the
// last fragment without the novelty test, so only the last fragment may
// repeat earlier material. This reproduces the standard worked histories
// (e.g. TTCCPSTCIVPSA -> T.TC.C.P.S.TCI.V.PSA) exactly, which the literal
// fragment-set membership test does not.

struct ExhaustiveHistory {
    std::vector<std::string> fragments;

    int complexity() const { return static_cast<int>(fragments.size()); }
};

namespace detail {

// Candidate s[ci..cj] is reproducible when it starts at a fragment start and
// ends at a fragment end inside the processed prefix s[0..ci-1].
inline bool lz_seen(const char* s, int ci, int cj,
                    const std::vector<int>& starts, const std::vector<char>& is_start) {
    const int len = cj - ci + 1;
    for (int b : starts) {
        const int end = b + len;
        if (end > ci) break;  // starts are ascending; later ones overflow too
        if ((end == ci || is_start[static_cast<std::size_t>(end)]) &&
            std::memcmp(s + b, s + ci, static_cast<std::size_t>(len)) == 0)
            return true;
    }
    return false;
}

/// Fragment start offsets of the exhaustive history of s[0..n-1].
inline void lz_parse(const char* s, int n, std::vector<int>& starts) {
    starts.clear();
    starts.push_back(0);
    thread_local std::vector<char> is_start;
    is_start.assign(static_cast<std::size_t>(n) + 1, 0);
    is_start[0] = 1;

    int ci = 1, cj = 1;
    while (true) {
        if (cj >= n - 1) {
            if (ci <= n - 1) starts.push_back(ci);
            return;
        }
        if (lz_seen(s, ci, cj, starts, is_start)) {
            ++cj;
        } else {
            starts.push_back(ci);
            is_start[static_cast<std::size_t>(ci)] = 1;
            ci = cj + 1;
            cj = ci;
        }
    }
}

inline int lz_complexity_raw(const char* s, int n) {
    thread_local std::vector<int> starts;
    lz_parse(s, n, starts);
    return static_cast<int>(starts.size());
}

}  // namespace detail

inline ExhaustiveHistory exhaustive_history(std::string_view s) {
    if (s.empty()) throw ConfigError("exhaustive_history: empty string");
    std::vector<int> starts;
    detail::lz_parse(s.data(), static_cast<int>(s.size()), starts);
    ExhaustiveHistory h;
    h.fragments.reserve(starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) {
        const int b = starts[k];
        const int e = k + 1 < starts.size() ? starts[k + 1] : static_cast<int>(s.size());
        h.fragments.emplace_back(s.substr(static_cast<std::size_t>(b),
                                          static_cast<std::size_t>(e - b)));
    }
    return h;
}

/// Number of fragments in the exhaustive history.
inline int lz_complexity(std::string_view s) {
    if (s.empty()) throw ConfigError("lz_complexity: empty string");
    return detail::lz_complexity_raw(s.data(), static_cast<int>(s.size()));
}

/// Complexity of the concatenation p+q without materializing a std::string.
inline int lz_complexity_concat(std::string_view p, std::string_view q) {
    if (p.empty() || q.empty()) throw ConfigError("lz_complexity_concat: empty string");
    const std::size_t n = p.size() + q.size();
    char stack_buf[256];
    thread_local std::vector<char> heap_buf;
    char* buf;
    if (n <= sizeof(stack_buf)) {
        buf = stack_buf;
    } else {
        heap_buf.resize(n);
        buf = heap_buf.data();
    }
    std::memcpy(buf, p.data(), p.size());
    std::memcpy(buf + p.size(), q.data(), q.size());
    return detail::lz_complexity_raw(buf, static_cast<int>(n));
}

/// zeta(p, q) = c(pq) - c(p): complexity gained by appending q to p.
inline int zeta(std::string_view p, std::string_view q) {
    if (p.empty() || q.empty()) throw ConfigError("zeta: empty string");
    return lz_complexity_concat(p, q) - lz_complexity(p);
}

/// zeta with the complexity of p already known (hot path).
inline int zeta(std::string_view p, std::string_view q, int complexity_p) {
    return lz_complexity_concat(p, q) - complexity_p;
}

/// Normalized LZ dissimilarity: max{zeta(p,q), zeta(q,p)} / max{c(p), c(q)}.
inline Ratio lz_score(std::string_view p, std::string_view q) {
    if (p.empty() || q.empty()) throw ConfigError("lz_score: empty string");
    const int cp = lz_complexity(p);
    const int cq = lz_complexity(q);
    const int z = std::max(zeta(p, q, cp), zeta(q, p, cq));
    return Ratio(z, std::max(cp, cq));
}

}  // namespace mcp
