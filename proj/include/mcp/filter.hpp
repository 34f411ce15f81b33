#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcp/error.hpp"
#include "mcp/ingest.hpp"

namespace mcp {

/// Same-length rewrite rules removing biologically impossible structure
/// motifs. Rules are data so experiment variants can disable or extend them.
struct FilterRuleSet {
    struct Rule {
        std::string pattern;
        std::string replacement;
    };
    std::vector<Rule> rules;

    static FilterRuleSet biological() {
        return {{{"EHE", "EEE"},
                 {"HEH", "HHH"},
                 {"HCH", "HHH"},
                 {"ECE", "EEE"},
                 {"HEEH", "HHHH"}}};
    }

    void validate() const {
        for (const auto& r : rules)
            if (r.pattern.empty() || r.pattern.size() != r.replacement.size())
                throw ConfigError("filter rule pattern/replacement lengths differ");
    }
};

/// Rewrite to fixpoint: repeated left-to-right passes, trying the rules in
/// listed order at each position, until no pattern occurs. Output length
/// equals input length. A single pass can still leave patterns created by
/// earlier replacements, hence the fixpoint iteration; a pass budget guards
/// termination.
inline std::string filter_structure(std::string structure, const FilterRuleSet& rules,
                                    const ClassAlphabet& classes = structure_classes()) {
    rules.validate();
    for (std::size_t i = 0; i < structure.size(); ++i)
        if (!classes.contains(structure[i]))
            throw ConfigError("filter_structure: illegal structure character '" +
                              std::string(1, structure[i]) + "' at position " + std::to_string(i));
    const std::size_t max_passes = 4 * structure.size() + 8;
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        bool changed = false;
        for (std::size_t pos = 0; pos < structure.size(); ++pos) {
            for (const auto& rule : rules.rules) {
                if (pos + rule.pattern.size() <= structure.size() &&
                    structure.compare(pos, rule.pattern.size(), rule.pattern) == 0) {
                    structure.replace(pos, rule.replacement.size(), rule.replacement);
                    changed = true;
                    break;
                }
            }
        }
        if (!changed) return structure;
    }
    throw ConvergenceError("filter_structure: no fixpoint within pass budget");
}

}  // namespace mcp
