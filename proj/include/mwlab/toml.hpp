#pragma once
// Minimal fail-closed TOML subset: bare keys, one level of [section] tables,
// and scalar values (double-quoted strings with \" \\ \n \t \r escapes,
// true/false, 64-bit integers, floats). Comments start with '#'. Anything
// outside the subset -- arrays, inline tables, dotted keys, multi-line
// strings, duplicate keys or sections -- is a ParseError naming the source
// line, so a typo can never silently change the physics of a run.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace mwlab::toml {

struct Value {
    enum class Kind { string, boolean, integer, floating };
    Kind kind = Kind::integer;
    std::string str;
    bool b = false;
    std::int64_t i = 0;
    double f = 0.0;
    int line = 0; // 1-based source line, for schema-layer error messages
};

using Table = std::map<std::string, Value>;

struct Document {
    Table root;                            // keys before the first section
    std::map<std::string, Table> sections; // [name] tables
};

// ParseError on any syntax violation; `origin` (typically the file name) is
// prepended to the message when non-empty.
Document parse(std::string_view text, const std::string& origin = "");

} // namespace mwlab::toml
