#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcp/error.hpp"

namespace mcp {

// The 20 proteinogenic amino-acid letters.
inline constexpr std::string_view kAminoAcids = "ACDEFGHIKLMNPQRSTVWY";

// Placeholder for unknown residues. It behaves as an ordinary character in
// edit distance and n-gram extraction but never matches a real amino acid in
// the dissimilarity-rate character sets.
inline constexpr char kUnknownResidue = 'X';

inline bool is_amino_acid(char c) {
    return kAminoAcids.find(c) != std::string_view::npos;
}

/// Map source-data oddballs (B, Z, U, X: ambiguous or non-standard residues)
/// to the X placeholder. Returns 0 for characters that are not residues.
inline char normalize_residue(char c) {
    if (is_amino_acid(c)) return c;
    if (c == 'B' || c == 'Z' || c == 'U' || c == 'X') return kUnknownResidue;
    return 0;
}

/// Ordered secondary-structure class set. Index order doubles as the
/// deterministic tie-break order everywhere a tie must be resolved.
struct ClassAlphabet {
    std::string classes = "HEC";

    int size() const { return static_cast<int>(classes.size()); }
    char label(int index) const { return classes[static_cast<std::size_t>(index)]; }
    int index(char c) const {
        const auto pos = classes.find(c);
        return pos == std::string::npos ? -1 : static_cast<int>(pos);
    }
    bool contains(char c) const { return index(c) >= 0; }
};

inline const ClassAlphabet& structure_classes() {
    static const ClassAlphabet alphabet;
    return alphabet;
}

/// Reduce an 8-state structure string (DSSP letters H,G,I,E,B,T,S,C plus '-')
/// to the 3-state alphabet: H,G,I -> H; E,B -> E; everything else -> C.
inline std::string reduce_labels(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        switch (raw[i]) {
            case 'H': case 'G': case 'I': out.push_back('H'); break;
            case 'E': case 'B':           out.push_back('E'); break;
            case 'T': case 'S': case 'C': case '-': out.push_back('C'); break;
            default:
                throw ParseError("reduce_labels: unknown structure character '" +
                                 std::string(1, raw[i]) + "' at position " + std::to_string(i));
        }
    }
    return out;
}

/// One named protein chain: amino-acid sequence plus per-residue 3-state
/// labels of identical length. The structure may be empty for prediction-only
/// inputs; when present it must align residue-for-residue.
struct ProteinRecord {
    std::string id;
    std::string sequence;   // over kAminoAcids + X
    std::string structure;  // over the class alphabet, or empty (unlabeled)

    std::size_t length() const { return sequence.size(); }
    bool labeled() const { return !structure.empty(); }
};

struct Dataset {
    std::vector<ProteinRecord> records;
    std::string name;
    std::size_t residue_count = 0;

    /// Fraction of residues per class, in class-alphabet order. Sums to 1
    /// whenever the dataset contains at least one labeled residue.
    std::vector<double> class_proportions(const ClassAlphabet& classes = structure_classes()) const {
        std::vector<double> counts(static_cast<std::size_t>(classes.size()), 0.0);
        double total = 0.0;
        for (const auto& rec : records)
            for (char c : rec.structure) {
                counts[static_cast<std::size_t>(classes.index(c))] += 1.0;
                total += 1.0;
            }
        if (total > 0.0)
            for (auto& v : counts) v /= total;
        return counts;
    }
};

namespace detail {

inline void validate_record(ProteinRecord& rec, bool reduce_8_state,
                            const ClassAlphabet& classes) {
    if (rec.id.empty()) throw ParseError("record with empty id");
    if (rec.labeled() && reduce_8_state) rec.structure = reduce_labels(rec.structure);
    if (rec.labeled() && rec.sequence.size() != rec.structure.size())
        throw ParseError("record '" + rec.id + "': sequence length " +
                         std::to_string(rec.sequence.size()) + " != structure length " +
                         std::to_string(rec.structure.size()));
    for (std::size_t i = 0; i < rec.sequence.size(); ++i) {
        const char norm = normalize_residue(rec.sequence[i]);
        if (norm == 0)
            throw ParseError("record '" + rec.id + "': illegal sequence character '" +
                             std::string(1, rec.sequence[i]) + "' at position " + std::to_string(i));
        rec.sequence[i] = norm;
    }
    for (std::size_t i = 0; i < rec.structure.size(); ++i)
        if (!classes.contains(rec.structure[i]))
            throw ParseError("record '" + rec.id + "': illegal structure character '" +
                             std::string(1, rec.structure[i]) + "' at position " + std::to_string(i));
}

inline Dataset finalize_dataset(std::vector<ProteinRecord> records, std::string name,
                                bool reduce_8_state, const ClassAlphabet& classes) {
    Dataset ds;
    ds.name = std::move(name);
    ds.records = std::move(records);
    std::set<std::string> seen_ids;
    for (auto& rec : ds.records) {
        validate_record(rec, reduce_8_state, classes);
        if (!seen_ids.insert(rec.id).second)
            throw ParseError("duplicate record id '" + rec.id + "'");
        ds.residue_count += rec.length();
    }
    return ds;
}

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

// FASTA bodies may wrap sequences over multiple lines.
inline std::vector<ProteinRecord> read_fasta_entries(std::istream& in, const std::string& what) {
    std::vector<ProteinRecord> entries;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '>') {
            ProteinRecord rec;
            std::istringstream header(line.substr(1));
            header >> rec.id;
            entries.push_back(std::move(rec));
        } else {
            if (entries.empty())
                throw ParseError(what + ": sequence data before first '>' header");
            entries.back().sequence += line;
        }
    }
    return entries;
}

}  // namespace detail

enum class DatasetFormat {
    PairedLines,  // repeated: >id / sequence line / structure line
    FastaLike,    // FASTA sequences; structures as FASTA in <path>.struct
};

/// Native sibling path holding structures for a FASTA-like dataset.
inline std::string fasta_structure_path(const std::string& path) { return path + ".struct"; }

inline Dataset parse_dataset_stream(std::istream& in, const std::string& name,
                                    bool reduce_8_state = false,
                                    const ClassAlphabet& classes = structure_classes()) {
    std::vector<ProteinRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        if (line[0] != '>')
            throw ParseError(name + ":" + std::to_string(lineno) + ": expected '>id' line");
        ProteinRecord rec;
        std::istringstream header(line.substr(1));
        header >> rec.id;
        if (!std::getline(in, line))
            throw ParseError(name + ": record '" + rec.id + "': missing sequence line");
        rec.sequence = detail::strip_cr(line);
        ++lineno;
        if (!std::getline(in, line))
            throw ParseError(name + ": record '" + rec.id + "': missing structure line");
        rec.structure = detail::strip_cr(line);
        ++lineno;
        records.push_back(std::move(rec));
    }
    return detail::finalize_dataset(std::move(records), name, reduce_8_state, classes);
}

/// Parse a dataset file. PairedLines is the native format; FastaLike reads
/// sequences from `path` and structures from `fasta_structure_path(path)`,
/// matched by record id.
inline Dataset parse_dataset(const std::string& path, DatasetFormat format,
                             bool reduce_8_state = false,
                             const ClassAlphabet& classes = structure_classes()) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dataset file '" + path + "'");
    if (format == DatasetFormat::PairedLines)
        return parse_dataset_stream(in, path, reduce_8_state, classes);

    auto entries = detail::read_fasta_entries(in, path);
    const std::string spath = fasta_structure_path(path);
    std::ifstream sin(spath);
    if (!sin) throw ParseError("cannot open structure file '" + spath + "'");
    auto structures = detail::read_fasta_entries(sin, spath);
    std::map<std::string, std::string> by_id;
    for (auto& s : structures) by_id[s.id] = s.sequence;
    for (auto& rec : entries) {
        auto it = by_id.find(rec.id);
        if (it == by_id.end())
            throw ParseError(spath + ": no structure for record '" + rec.id + "'");
        rec.structure = it->second;
    }
    return detail::finalize_dataset(std::move(entries), path, reduce_8_state, classes);
}

/// Parse prediction input: sequences only (FASTA headers + bodies, or the
/// paired format with structure lines ignored is not supported -- predict
/// consumes plain FASTA).
inline std::vector<ProteinRecord> parse_sequences(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sequence file '" + path + "'");
    auto entries = detail::read_fasta_entries(in, path);
    std::set<std::string> seen_ids;
    for (auto& rec : entries) {
        detail::validate_record(rec, false, structure_classes());
        if (!seen_ids.insert(rec.id).second)
            throw ParseError("duplicate record id '" + rec.id + "'");
    }
    return entries;
}

/// Serialize in the native paired-lines format; parsing it back yields an
/// identical dataset.
inline void write_dataset(std::ostream& out, const Dataset& ds) {
    for (const auto& rec : ds.records)
        out << '>' << rec.id << '\n' << rec.sequence << '\n' << rec.structure << '\n';
}

inline void write_dataset(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write dataset file '" + path + "'");
    write_dataset(out, ds);
}

}  // namespace mcp
