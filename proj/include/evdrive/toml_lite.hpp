#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace evdrive::toml {

// Minimal parser for the subset of TOML the scenario and config files use:
// bare tables, arrays of tables, and string/number/bool/array values.
// Anything outside that subset is a parse error, not silently ignored.

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Value {
public:
    enum class Kind { String, Number, Bool, Array };

    Value() : kind_(Kind::Number), number_(0.0) {}
    explicit Value(std::string s) : kind_(Kind::String), string_(std::move(s)) {}
    explicit Value(double d) : kind_(Kind::Number), number_(d) {}
    explicit Value(bool b) : kind_(Kind::Bool), bool_(b) {}
    explicit Value(std::vector<Value> a) : kind_(Kind::Array), array_(std::move(a)) {}

    Kind kind() const { return kind_; }

    const std::string& as_string() const {
        require(Kind::String, "string");
        return string_;
    }
    double as_number() const {
        require(Kind::Number, "number");
        return number_;
    }
    bool as_bool() const {
        require(Kind::Bool, "bool");
        return bool_;
    }
    const std::vector<Value>& as_array() const {
        require(Kind::Array, "array");
        return array_;
    }

private:
    void require(Kind k, const char* name) const {
        if (kind_ != k) throw ParseError(std::string("value is not a ") + name);
    }

    Kind kind_;
    std::string string_;
    double number_ = 0.0;
    bool bool_ = false;
    std::vector<Value> array_;
};

struct Table {
    std::map<std::string, Value> entries;

    bool has(const std::string& key) const { return entries.count(key) > 0; }
    const Value& at(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;
};

struct Document {
    Table root;                                        // keys before any [table]
    std::map<std::string, Table> tables;               // [name]
    std::map<std::string, std::vector<Table>> lists;   // [[name]]
};

Document parse_string(const std::string& text);
Document parse_file(const std::string& path);

}  // namespace evdrive::toml
