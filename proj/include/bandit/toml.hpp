#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bandit::toml {

// A TOML subset sufficient for experiment presets: bare keys, basic and
// literal strings, integers, floats, booleans, single-line arrays of
// scalars, [table] and [[array-of-tables]] headers, and # comments.

using Scalar = std::variant<std::int64_t, double, bool, std::string>;
using Value = std::variant<std::int64_t, double, bool, std::string, std::vector<Scalar>>;

struct Table {
    std::string name;  ///< header name; empty for the root table
    std::vector<std::pair<std::string, Value>> entries;
    int line = 0;

    const Value* find(const std::string& key) const;
};

struct Document {
    Table root;
    /// Every [name] and [[name]] table in order of appearance.
    std::vector<Table> tables;
};

/// Throws ConfigError keyed "line N" on malformed input or duplicate keys.
Document parse(const std::string& text);

std::string type_name(const Value& value);

}  // namespace bandit::toml
