#pragma once

#include <string>
#include <utility>
#include <vector>

namespace swsym {

// Deterministic JSON document builder.  Object keys render in insertion
// order, doubles with 17 significant digits, so identical inputs produce
// byte-identical files run after run.
class JsonValue {
 public:
  JsonValue() = default;

  static JsonValue object();
  static JsonValue array();
  static JsonValue string(std::string s);
  static JsonValue number(double v);
  static JsonValue integer(long long v);
  static JsonValue boolean(bool v);
  static JsonValue null();

  // Object member (insertion ordered) / array element append.
  JsonValue& set(const std::string& key, JsonValue v);
  JsonValue& push(JsonValue v);

  bool is_object() const;
  bool is_array() const;

  // Pretty form with two-space indentation, no trailing newline.
  std::string render() const;

 private:
  enum class Kind { null, boolean, integer, number, string, array, object };
  Kind kind_ = Kind::null;
  bool b_ = false;
  long long i_ = 0;
  double d_ = 0;
  std::string s_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> members_;

  void render_to(std::string& out, int depth) const;
};

// %.17g rendering shared by the JSON and CSV emitters.
std::string double_text(double v);

// Writes content to path, throwing on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace swsym
