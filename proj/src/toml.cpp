#include "bandit/toml.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "bandit/errors.hpp"

namespace bandit::toml {

const Value* Table::find(const std::string& key) const
{
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

std::string type_name(const Value& value)
{
    switch (value.index()) {
    case 0: return "integer";
    case 1: return "float";
    case 2: return "boolean";
    case 3: return "string";
    default: return "array";
    }
}

namespace {

class LineParser {
public:
    LineParser(const std::string& text, int line) : text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("line " + std::to_string(line_), what);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool at_end_or_comment()
    {
        skip_ws();
        return pos_ >= text_.size() || text_[pos_] == '#';
    }

    bool consume(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string bare_key()
    {
        skip_ws();
        const auto start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                                       text_[pos_] == '-' || text_[pos_] == '.'))
            ++pos_;
        if (pos_ == start) fail("expected a key");
        return text_.substr(start, pos_ - start);
    }

    std::string quoted()
    {
        const char quote = text_[pos_++];
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != quote) {
            char c = text_[pos_++];
            if (quote == '"' && c == '\\') {
                if (pos_ >= text_.size()) break;
                const char e = text_[pos_++];
                switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            }
            out.push_back(c);
        }
        if (pos_ >= text_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    Scalar scalar()
    {
        skip_ws();
        if (pos_ >= text_.size()) fail("expected a value");
        const char c = text_[pos_];
        if (c == '"' || c == '\'') return quoted();
        const auto start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '#' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string token = text_.substr(start, pos_ - start);
        if (token == "true") return true;
        if (token == "false") return false;
        if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
        if (token == "-inf") return -std::numeric_limits<double>::infinity();
        std::string digits;
        for (char d : token)
            if (d != '_') digits.push_back(d);
        if (digits.empty()) fail("expected a value");
        const bool is_float = digits.find_first_of(".eE") != std::string::npos;
        if (!is_float) {
            std::int64_t v = 0;
            const char* first = digits.data() + (digits[0] == '+' ? 1 : 0);
            const auto [end, ec] = std::from_chars(first, digits.data() + digits.size(), v);
            if (ec != std::errc() || end != digits.data() + digits.size()) fail("invalid value '" + token + "'");
            return v;
        }
        char* end = nullptr;
        const double v = std::strtod(digits.c_str(), &end);
        if (end != digits.c_str() + digits.size()) fail("invalid value '" + token + "'");
        return v;
    }

    Value value()
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '[') {
            ++pos_;
            std::vector<Scalar> items;
            if (consume(']')) return items;
            while (true) {
                items.push_back(scalar());
                if (consume(']')) break;
                if (!consume(',')) fail("expected ',' or ']' in array");
                if (consume(']')) break;  // trailing comma
            }
            return items;
        }
        return std::visit([](auto&& s) -> Value { return s; }, scalar());
    }

private:
    const std::string& text_;
    int line_;
    std::size_t pos_ = 0;
};

}  // namespace

Document parse(const std::string& text)
{
    Document doc;
    Table* current = &doc.root;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        LineParser p(line, number);
        if (p.at_end_or_comment()) continue;
        if (p.consume('[')) {
            const bool array = p.consume('[');
            Table table;
            table.name = p.bare_key();
            table.line = number;
            if (!p.consume(']') || (array && !p.consume(']'))) p.fail("malformed table header");
            if (!p.at_end_or_comment()) p.fail("trailing characters after table header");
            if (!array)
                for (const auto& t : doc.tables)
                    if (t.name == table.name) p.fail("duplicate table [" + table.name + "]");
            doc.tables.push_back(std::move(table));
            current = &doc.tables.back();
            continue;
        }
        std::string key = p.bare_key();
        if (!p.consume('=')) p.fail("expected '=' after key '" + key + "'");
        Value v = p.value();
        if (!p.at_end_or_comment()) p.fail("trailing characters after value of '" + key + "'");
        if (current->find(key)) p.fail("duplicate key '" + key + "'");
        current->entries.emplace_back(std::move(key), std::move(v));
    }
    return doc;
}

}  // namespace bandit::toml
