#ifndef IMMINDEX_JSON_WRITER_HPP
#define IMMINDEX_JSON_WRITER_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace immindex {

/// Minimal ordered JSON document builder. Keys keep insertion order and
/// doubles are rendered with 17 significant digits via a fixed "%.17g"
/// format, so a given tree always serializes to the same bytes -- reports
/// produced from the same inputs and seed are byte-identical.
class JsonValue {
public:
    static JsonValue object();
    static JsonValue array();
    static JsonValue string(std::string s);
    static JsonValue number(double v);
    static JsonValue integer(std::int64_t v);
    static JsonValue boolean(bool v);
    static JsonValue null();

    JsonValue& set(const std::string& key, JsonValue v);  // object
    JsonValue& push(JsonValue v);                         // array

    /// Convenience for numeric vectors.
    static JsonValue number_array(const std::vector<double>& vs);

    std::string dump(int indent = 0) const;

private:
    enum class Kind { Object, Array, String, Number, Integer, Boolean, Null };
    Kind kind_ = Kind::Null;
    std::string str_;
    double num_ = 0.0;
    std::int64_t int_ = 0;
    bool bool_ = false;
    std::vector<std::pair<std::string, JsonValue>> members_;
    std::vector<JsonValue> items_;

    void dump_into(std::string& out, int indent, int depth) const;
};

/// 17-significant-digit rendering used for every double in reports.
std::string format_double(double v);

}  // namespace immindex

#endif
