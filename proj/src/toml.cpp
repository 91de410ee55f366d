#include "mwlab/toml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "mwlab/errors.hpp"

namespace mwlab::toml {

namespace {

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& msg) {
    std::string full;
    if (!origin.empty()) full = origin + ": ";
    full += "line " + std::to_string(line) + ": " + msg;
    throw ParseError(full);
}

bool key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// One physical line, already stripped of the newline.
struct LineScanner {
    std::string_view s;
    std::size_t pos = 0;
    const std::string& origin;
    int line;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= s.size() || s[pos] == '#';
    }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }

    std::string take_key() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && key_char(s[pos])) ++pos;
        if (pos == start) fail(origin, line, "expected a key");
        return std::string(s.substr(start, pos - start));
    }

    void expect(char c, const char* what) {
        skip_ws();
        if (pos >= s.size() || s[pos] != c)
            fail(origin, line, std::string("expected '") + c + "' " + what);
        ++pos;
    }

    std::string take_string() {
        ++pos; // opening quote
        std::string out;
        while (true) {
            if (pos >= s.size()) fail(origin, line, "unterminated string");
            char c = s[pos++];
            if (c == '"') return out;
            if (c == '\\') {
                if (pos >= s.size()) fail(origin, line, "unterminated string");
                char e = s[pos++];
                switch (e) {
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    default:
                        fail(origin, line,
                             std::string("unsupported escape '\\") + e + "'");
                }
            } else {
                out += c;
            }
        }
    }

    Value take_value() {
        skip_ws();
        if (pos >= s.size()) fail(origin, line, "expected a value");
        Value v;
        v.line = line;
        if (s[pos] == '"') {
            v.kind = Value::Kind::string;
            v.str = take_string();
            return v;
        }
        // bare token up to whitespace or comment
        std::size_t start = pos;
        while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t' &&
               s[pos] != '#')
            ++pos;
        std::string_view tok = s.substr(start, pos - start);
        if (tok == "true" || tok == "false") {
            v.kind = Value::Kind::boolean;
            v.b = (tok == "true");
            return v;
        }
        std::string_view num = tok;
        if (!num.empty() && num.front() == '+') num.remove_prefix(1);
        bool integral = !num.empty();
        for (std::size_t i = 0; i < num.size(); ++i) {
            char c = num[i];
            if (i == 0 && c == '-') continue;
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                integral = false;
                break;
            }
        }
        if (num == "-") integral = false;
        if (integral) {
            v.kind = Value::Kind::integer;
            auto [p, ec] =
                std::from_chars(num.data(), num.data() + num.size(), v.i);
            if (ec != std::errc() || p != num.data() + num.size())
                fail(origin, line,
                     "integer out of range '" + std::string(tok) + "'");
            return v;
        }
        v.kind = Value::Kind::floating;
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v.f);
        if (ec != std::errc() || p != num.data() + num.size() ||
            !std::isfinite(v.f))
            fail(origin, line, "malformed value '" + std::string(tok) + "'");
        return v;
    }
};

} // namespace

Document parse(std::string_view text, const std::string& origin) {
    Document doc;
    Table* current = &doc.root;
    std::string current_name; // for duplicate-key messages only

    int line = 0;
    std::size_t cursor = 0;
    while (cursor <= text.size()) {
        if (cursor == text.size() && line > 0) break;
        std::size_t eol = text.find('\n', cursor);
        std::string_view raw = (eol == std::string_view::npos)
                                   ? text.substr(cursor)
                                   : text.substr(cursor, eol - cursor);
        cursor = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        LineScanner sc{raw, 0, origin, line};
        if (sc.at_end()) continue;

        if (sc.peek() == '[') {
            ++sc.pos;
            std::string name = sc.take_key();
            sc.expect(']', "closing the section header");
            if (!sc.at_end())
                fail(origin, line, "unexpected text after section header");
            auto [it, inserted] = doc.sections.emplace(name, Table{});
            if (!inserted)
                fail(origin, line, "duplicate section [" + name + "]");
            current = &it->second;
            current_name = name;
            continue;
        }

        std::string key = sc.take_key();
        sc.expect('=', "after the key");
        Value v = sc.take_value();
        if (!sc.at_end())
            fail(origin, line, "unexpected text after the value of '" + key + "'");
        auto [it, inserted] = current->emplace(std::move(key), std::move(v));
        if (!inserted)
            fail(origin, line,
                 "duplicate key '" + it->first + "'" +
                     (current_name.empty() ? "" : " in [" + current_name + "]"));
    }
    return doc;
}

} // namespace mwlab::toml
