#include "immindex/json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace immindex {

std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

JsonValue JsonValue::object() {
    JsonValue v;
    v.kind_ = Kind::Object;
    return v;
}

JsonValue JsonValue::array() {
    JsonValue v;
    v.kind_ = Kind::Array;
    return v;
}

JsonValue JsonValue::string(std::string s) {
    JsonValue v;
    v.kind_ = Kind::String;
    v.str_ = std::move(s);
    return v;
}

JsonValue JsonValue::number(double d) {
    JsonValue v;
    v.kind_ = Kind::Number;
    v.num_ = d;
    return v;
}

JsonValue JsonValue::integer(std::int64_t i) {
    JsonValue v;
    v.kind_ = Kind::Integer;
    v.int_ = i;
    return v;
}

JsonValue JsonValue::boolean(bool b) {
    JsonValue v;
    v.kind_ = Kind::Boolean;
    v.bool_ = b;
    return v;
}

JsonValue JsonValue::null() { return JsonValue(); }

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
    members_.emplace_back(key, std::move(v));
    return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
    items_.push_back(std::move(v));
    return *this;
}

JsonValue JsonValue::number_array(const std::vector<double>& vs) {
    JsonValue a = array();
    for (double v : vs) a.push(number(v));
    return a;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void newline_indent(std::string& out, int indent, int depth) {
    if (indent <= 0) return;
    out += '\n';
    out.append(size_t(indent) * depth, ' ');
}

}  // namespace

void JsonValue::dump_into(std::string& out, int indent, int depth) const {
    switch (kind_) {
        case Kind::Null: out += "null"; break;
        case Kind::Boolean: out += bool_ ? "true" : "false"; break;
        case Kind::Integer: out += std::to_string(int_); break;
        case Kind::Number: out += format_double(num_); break;
        case Kind::String: escape_into(out, str_); break;
        case Kind::Array: {
            out += '[';
            for (size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ',';
                newline_indent(out, indent, depth + 1);
                items_[i].dump_into(out, indent, depth + 1);
            }
            if (!items_.empty()) newline_indent(out, indent, depth);
            out += ']';
            break;
        }
        case Kind::Object: {
            out += '{';
            for (size_t i = 0; i < members_.size(); ++i) {
                if (i) out += ',';
                newline_indent(out, indent, depth + 1);
                escape_into(out, members_[i].first);
                out += indent > 0 ? ": " : ":";
                members_[i].second.dump_into(out, indent, depth + 1);
            }
            if (!members_.empty()) newline_indent(out, indent, depth);
            out += '}';
            break;
        }
    }
}

std::string JsonValue::dump(int indent) const {
    std::string out;
    dump_into(out, indent, 0);
    return out;
}

}  // namespace immindex
