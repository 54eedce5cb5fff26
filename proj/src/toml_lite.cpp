#include "evdrive/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace evdrive::toml {

const Value& Table::at(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw ParseError("missing key: " + key);
    return it->second;
}

double Table::number_or(const std::string& key, double fallback) const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second.as_number();
}

std::string Table::string_or(const std::string& key, const std::string& fallback) const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second.as_string();
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return done() ? '\0' : text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "line " << line << ": " << msg;
        throw ParseError(os.str());
    }

    void skip_ws_inline() {
        while (!done() && (peek() == ' ' || peek() == '\t')) take();
    }

    // Skips whitespace, newlines and comments — used inside arrays where
    // values may continue across lines.
    void skip_ws_any() {
        while (!done()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                take();
            } else if (c == '#') {
                while (!done() && peek() != '\n') take();
            } else {
                break;
            }
        }
    }
};

bool is_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string parse_key(Cursor& cur) {
    std::string key;
    while (!cur.done() && is_key_char(cur.peek())) key.push_back(cur.take());
    if (key.empty()) cur.fail("expected a key");
    return key;
}

Value parse_value(Cursor& cur);

Value parse_array(Cursor& cur) {
    cur.take();  // '['
    std::vector<Value> out;
    cur.skip_ws_any();
    if (cur.peek() == ']') {
        cur.take();
        return Value(std::move(out));
    }
    while (true) {
        out.push_back(parse_value(cur));
        cur.skip_ws_any();
        const char c = cur.peek();
        if (c == ',') {
            cur.take();
            cur.skip_ws_any();
            if (cur.peek() == ']') {  // trailing comma
                cur.take();
                return Value(std::move(out));
            }
        } else if (c == ']') {
            cur.take();
            return Value(std::move(out));
        } else {
            cur.fail("expected ',' or ']' in array");
        }
    }
}

Value parse_string_value(Cursor& cur) {
    cur.take();  // '"'
    std::string s;
    while (!cur.done() && cur.peek() != '"') {
        char c = cur.take();
        if (c == '\\' && !cur.done()) {
            const char e = cur.take();
            switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: cur.fail("unsupported escape");
            }
        } else if (c == '\n') {
            cur.fail("unterminated string");
        }
        s.push_back(c);
    }
    if (cur.done()) cur.fail("unterminated string");
    cur.take();  // closing '"'
    return Value(std::move(s));
}

Value parse_value(Cursor& cur) {
    cur.skip_ws_any();
    const char c = cur.peek();
    if (c == '[') return parse_array(cur);
    if (c == '"') return parse_string_value(cur);
    if (std::isalpha(static_cast<unsigned char>(c))) {
        std::string word;
        while (!cur.done() && std::isalpha(static_cast<unsigned char>(cur.peek())))
            word.push_back(cur.take());
        if (word == "true") return Value(true);
        if (word == "false") return Value(false);
        cur.fail("unexpected token '" + word + "'");
    }
    // Number: consume the token, then let from_chars validate all of it.
    std::string tok;
    while (!cur.done()) {
        const char n = cur.peek();
        if (n == '-' || n == '+' || n == '.' || n == 'e' || n == 'E' ||
            std::isdigit(static_cast<unsigned char>(n))) {
            tok.push_back(cur.take());
        } else {
            break;
        }
    }
    if (tok.empty()) cur.fail("expected a value");
    double d = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        cur.fail("bad number '" + tok + "'");
    return Value(d);
}

}  // namespace

Document parse_string(const std::string& text) {
    Document doc;
    Cursor cur{text};
    Table* target = &doc.root;

    while (!cur.done()) {
        cur.skip_ws_inline();
        const char c = cur.peek();
        if (c == '\0') break;
        if (c == '\n' || c == '\r') {
            cur.take();
            continue;
        }
        if (c == '#') {
            while (!cur.done() && cur.peek() != '\n') cur.take();
            continue;
        }
        if (c == '[') {
            cur.take();
            const bool is_list = cur.peek() == '[';
            if (is_list) cur.take();
            cur.skip_ws_inline();
            const std::string name = parse_key(cur);
            cur.skip_ws_inline();
            if (cur.peek() != ']') cur.fail("expected ']' after table name");
            cur.take();
            if (is_list) {
                if (cur.peek() != ']') cur.fail("expected ']]' after table name");
                cur.take();
                doc.lists[name].emplace_back();
                target = &doc.lists[name].back();
            } else {
                if (doc.tables.count(name)) cur.fail("duplicate table [" + name + "]");
                target = &doc.tables[name];
            }
            cur.skip_ws_inline();
            if (cur.peek() == '#') {
                while (!cur.done() && cur.peek() != '\n') cur.take();
            }
            continue;
        }
        const std::string key = parse_key(cur);
        cur.skip_ws_inline();
        if (cur.peek() != '=') cur.fail("expected '=' after key '" + key + "'");
        cur.take();
        cur.skip_ws_inline();
        Value v = parse_value(cur);
        if (target->entries.count(key)) cur.fail("duplicate key '" + key + "'");
        target->entries.emplace(key, std::move(v));
        cur.skip_ws_inline();
        if (cur.peek() == '#') {
            while (!cur.done() && cur.peek() != '\n') cur.take();
        }
        if (!cur.done() && cur.peek() != '\n' && cur.peek() != '\r')
            cur.fail("trailing characters after value for '" + key + "'");
    }
    return doc;
}

Document parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

}  // namespace evdrive::toml
