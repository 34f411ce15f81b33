#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mcp/error.hpp"
#include "mcp/ingest.hpp"
#include "mcp/lz.hpp"
#include "mcp/ratio.hpp"

namespace mcp {

/// Selects which factors of the compound measure are active. use_rho toggles
/// the character-set factors, use_ngram the shared-n-gram factor; with both
/// off the measure collapses to the normalized LZ score (ablation runs).
struct DissimilarityConfig {
    int n = 3;
    bool use_rho = true;
    bool use_ngram = true;

    void validate(int h) const {
        if (n < 1 || n >= h)
            throw ConfigError("n-gram size must satisfy 1 <= n < h, got n=" +
                              std::to_string(n) + ", h=" + std::to_string(h));
    }
};

namespace detail {

inline constexpr std::uint32_t kUnknownBit = 1u << (kUnknownResidue - 'A');

inline std::uint32_t char_mask(std::string_view s) {
    std::uint32_t mask = 0;
    for (char c : s) mask |= 1u << (c - 'A');
    return mask;
}

// X marks an unknown residue: two Xs are never known to be identical, so X
// can never land in the shared set, but it does count toward the union.
inline int mu_size(std::uint32_t pm, std::uint32_t qm) {
    return std::popcount((pm & qm) & ~kUnknownBit);
}

inline int delta_size(std::uint32_t pm, std::uint32_t qm) {
    const std::uint32_t mu = (pm & qm) & ~kUnknownBit;
    return std::popcount((pm | qm) & ~mu);
}

}  // namespace detail

/// Dissimilarity rate rho_d = (1 + |delta|) / (1 + |mu|): mu is the set of
/// characters the two strings share, delta the rest of their character
/// union. Positions are disregarded.
inline Ratio dissimilarity_rate(std::string_view p, std::string_view q) {
    if (p.empty() || q.empty()) throw ConfigError("dissimilarity_rate: empty string");
    const std::uint32_t pm = detail::char_mask(p);
    const std::uint32_t qm = detail::char_mask(q);
    return Ratio(1 + detail::delta_size(pm, qm), 1 + detail::mu_size(pm, qm));
}

/// All length-n substrings in positional order; duplicates preserved.
inline std::vector<std::string> ngram_patterns(std::string_view s, int n) {
    if (n < 1 || static_cast<std::size_t>(n) > s.size())
        throw ConfigError("ngram_patterns: n out of range for string of length " +
                          std::to_string(s.size()));
    std::vector<std::string> grams;
    grams.reserve(s.size() - static_cast<std::size_t>(n) + 1);
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i)
        grams.emplace_back(s.substr(i, static_cast<std::size_t>(n)));
    return grams;
}

/// Number of distinct n-grams the two strings share.
inline int ngram_score(std::string_view p, std::string_view q, int n) {
    const auto pg = ngram_patterns(p, n);
    const auto qg = ngram_patterns(q, n);
    const std::set<std::string> ps(pg.begin(), pg.end());
    const std::set<std::string> qs(qg.begin(), qg.end());
    int shared = 0;
    for (const auto& g : ps) shared += qs.count(g) ? 1 : 0;
    return shared;
}

/// Compound dissimilarity d~ of two sequences:
///
///       max{zeta(p,q), zeta(q,p)} * (1 + |mu|)
///   ---------------------------------------------
///   max{c(p), c(q)} * (1 + |delta|) * (1 + |Gamma|)
///
/// Inactive factors are replaced by 1. Note the character-set factors enter
/// as 1/rho_d, i.e. shared characters shrink the numerator.
inline Ratio compound_dissimilarity(std::string_view p, std::string_view q,
                                    const DissimilarityConfig& cfg) {
    if (p.empty() || q.empty()) throw ConfigError("compound_dissimilarity: empty string");
    if (cfg.use_ngram &&
        (cfg.n < 1 || static_cast<std::size_t>(cfg.n) >= std::min(p.size(), q.size())))
        throw ConfigError("compound_dissimilarity: n-gram size " + std::to_string(cfg.n) +
                          " not below min sequence length");
    const int cp = lz_complexity(p);
    const int cq = lz_complexity(q);
    std::int64_t num = std::max(zeta(p, q, cp), zeta(q, p, cq));
    std::int64_t den = std::max(cp, cq);
    if (cfg.use_rho) {
        const std::uint32_t pm = detail::char_mask(p);
        const std::uint32_t qm = detail::char_mask(q);
        num *= 1 + detail::mu_size(pm, qm);
        den *= 1 + detail::delta_size(pm, qm);
    }
    if (cfg.use_ngram) den *= 1 + ngram_score(p, q, cfg.n);
    return Ratio(num, den);
}

/// Levenshtein distance with unit insert/delete/substitute costs. Empty
/// strings are allowed.
inline int edit_distance(std::string_view x, std::string_view y) {
    const std::size_t nx = x.size(), ny = y.size();
    if (nx == 0) return static_cast<int>(ny);
    if (ny == 0) return static_cast<int>(nx);
    thread_local std::vector<int> row;
    row.resize(ny + 1);
    for (std::size_t j = 0; j <= ny; ++j) row[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= nx; ++i) {
        int diag = row[0];
        row[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= ny; ++j) {
            const int sub = diag + (x[i - 1] == y[j - 1] ? 0 : 1);
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
        }
    }
    return row[ny];
}

// ---------------------------------------------------------------------------
// Precomputed per-window profile for pairwise matrices. Pure derived data;
// pair evaluation against profiles returns values identical to the string
// operations above.
// ---------------------------------------------------------------------------

struct WindowProfile {
    std::string text;
    int complexity = 0;
    std::uint32_t char_mask = 0;
    std::vector<std::uint64_t> gram_codes;  // sorted distinct codes, n <= 12

    WindowProfile() = default;
    WindowProfile(std::string window, const DissimilarityConfig& cfg)
        : text(std::move(window)) {
        complexity = lz_complexity(text);
        char_mask = detail::char_mask(text);
        if (cfg.use_ngram) {
            if (cfg.n > 12)
                throw ConfigError("WindowProfile: n-gram size above 12 unsupported here");
            const std::size_t n = static_cast<std::size_t>(cfg.n);
            gram_codes.reserve(text.size() - n + 1);
            for (std::size_t i = 0; i + n <= text.size(); ++i) {
                std::uint64_t code = 0;
                for (std::size_t k = 0; k < n; ++k)
                    code = (code << 5) | static_cast<std::uint64_t>(text[i + k] - 'A');
                gram_codes.push_back(code);
            }
            std::sort(gram_codes.begin(), gram_codes.end());
            gram_codes.erase(std::unique(gram_codes.begin(), gram_codes.end()),
                             gram_codes.end());
        }
    }
};

namespace detail {

inline int sorted_intersection_size(const std::vector<std::uint64_t>& a,
                                    const std::vector<std::uint64_t>& b) {
    int count = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else { ++count; ++i; ++j; }
    }
    return count;
}

}  // namespace detail

inline Ratio pair_dissimilarity(const WindowProfile& a, const WindowProfile& b,
                                const DissimilarityConfig& cfg) {
    std::int64_t num = std::max(zeta(a.text, b.text, a.complexity),
                                zeta(b.text, a.text, b.complexity));
    std::int64_t den = std::max(a.complexity, b.complexity);
    if (cfg.use_rho) {
        num *= 1 + detail::mu_size(a.char_mask, b.char_mask);
        den *= 1 + detail::delta_size(a.char_mask, b.char_mask);
    }
    if (cfg.use_ngram)
        den *= 1 + detail::sorted_intersection_size(a.gram_codes, b.gram_codes);
    return Ratio(num, den);
}

/// Hot-path variant: same value as pair_dissimilarity(...).to_double() but
/// skips the gcd normalization.
inline double pair_dissimilarity_value(const WindowProfile& a, const WindowProfile& b,
                                       const DissimilarityConfig& cfg) {
    std::int64_t num = std::max(zeta(a.text, b.text, a.complexity),
                                zeta(b.text, a.text, b.complexity));
    std::int64_t den = std::max(a.complexity, b.complexity);
    if (cfg.use_rho) {
        num *= 1 + detail::mu_size(a.char_mask, b.char_mask);
        den *= 1 + detail::delta_size(a.char_mask, b.char_mask);
    }
    if (cfg.use_ngram)
        den *= 1 + detail::sorted_intersection_size(a.gram_codes, b.gram_codes);
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace mcp
