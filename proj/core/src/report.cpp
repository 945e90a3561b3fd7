#include "swsym/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "swsym/expr.hpp"

namespace swsym {

JsonValue JsonValue::object() {
  JsonValue v;
  v.kind_ = Kind::object;
  return v;
}

JsonValue JsonValue::array() {
  JsonValue v;
  v.kind_ = Kind::array;
  return v;
}

JsonValue JsonValue::string(std::string s) {
  JsonValue v;
  v.kind_ = Kind::string;
  v.s_ = std::move(s);
  return v;
}

JsonValue JsonValue::number(double d) {
  JsonValue v;
  v.kind_ = Kind::number;
  v.d_ = d;
  return v;
}

JsonValue JsonValue::integer(long long i) {
  JsonValue v;
  v.kind_ = Kind::integer;
  v.i_ = i;
  return v;
}

JsonValue JsonValue::boolean(bool b) {
  JsonValue v;
  v.kind_ = Kind::boolean;
  v.b_ = b;
  return v;
}

JsonValue JsonValue::null() { return JsonValue(); }

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
  if (kind_ != Kind::object)
    throw ExprError("JSON set() on a non-object value (key '" + key + "')");
  for (auto& [k, old] : members_)
    if (k == key) {
      old = std::move(v);
      return *this;
    }
  members_.emplace_back(key, std::move(v));
  return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
  if (kind_ != Kind::array) throw ExprError("JSON push() on a non-array value");
  items_.push_back(std::move(v));
  return *this;
}

bool JsonValue::is_object() const { return kind_ == Kind::object; }
bool JsonValue::is_array() const { return kind_ == Kind::array; }

std::string double_text(double v) {
  if (!std::isfinite(v)) return v > 0 ? "1e999" : (v < 0 ? "-1e999" : "null");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
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

void indent_to(std::string& out, int depth) { out.append(2 * depth, ' '); }

}  // namespace

void JsonValue::render_to(std::string& out, int depth) const {
  switch (kind_) {
    case Kind::null: out += "null"; break;
    case Kind::boolean: out += b_ ? "true" : "false"; break;
    case Kind::integer: out += std::to_string(i_); break;
    case Kind::number: out += double_text(d_); break;
    case Kind::string: append_escaped(out, s_); break;
    case Kind::array: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        indent_to(out, depth + 1);
        items_[i].render_to(out, depth + 1);
        out += (i + 1 < items_.size()) ? ",\n" : "\n";
      }
      indent_to(out, depth);
      out += ']';
      break;
    }
    case Kind::object: {
      if (members_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        indent_to(out, depth + 1);
        append_escaped(out, members_[i].first);
        out += ": ";
        members_[i].second.render_to(out, depth + 1);
        out += (i + 1 < members_.size()) ? ",\n" : "\n";
      }
      indent_to(out, depth);
      out += '}';
      break;
    }
  }
}

std::string JsonValue::render() const {
  std::string out;
  render_to(out, 0);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExprError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw ExprError("failed while writing file: " + path);
}

}  // namespace swsym
