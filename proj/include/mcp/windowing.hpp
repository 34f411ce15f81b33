#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mcp/error.hpp"
#include "mcp/ingest.hpp"

namespace mcp {

/// Fixed-length residue window centered on one target residue. Residues
/// closer than (h-1)/2 to either end are padded with X so every residue of a
/// protein receives a prediction.
struct WindowSample {
    std::string window;
    char center_label = 0;  // 0 when the source record is unlabeled
    std::string protein_id;
    std::size_t position = 0;

    bool labeled() const { return center_label != 0; }
};

inline void check_window_size(int h) {
    if (h < 5 || h % 2 == 0)
        throw ConfigError("window size h must be odd and >= 5, got " + std::to_string(h));
}

/// One window per residue, in sequence order.
inline std::vector<WindowSample> make_windows(const ProteinRecord& record, int h) {
    check_window_size(h);
    const int half = (h - 1) / 2;
    const int len = static_cast<int>(record.length());
    std::vector<WindowSample> samples;
    samples.reserve(record.length());
    for (int pos = 0; pos < len; ++pos) {
        WindowSample s;
        s.window.reserve(static_cast<std::size_t>(h));
        for (int k = pos - half; k <= pos + half; ++k)
            s.window.push_back(k < 0 || k >= len ? kUnknownResidue
                                                 : record.sequence[static_cast<std::size_t>(k)]);
        if (record.labeled()) s.center_label = record.structure[static_cast<std::size_t>(pos)];
        s.protein_id = record.id;
        s.position = static_cast<std::size_t>(pos);
        samples.push_back(std::move(s));
    }
    return samples;
}

inline std::vector<WindowSample> make_windows(const Dataset& ds, int h) {
    std::vector<WindowSample> all;
    all.reserve(ds.residue_count);
    for (const auto& rec : ds.records) {
        auto ws = make_windows(rec, h);
        for (auto& w : ws) all.push_back(std::move(w));
    }
    return all;
}

}  // namespace mcp
