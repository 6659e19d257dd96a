#include "skewmix/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace skewmix {

using nlohmann::json;

namespace {

class TomlReader {
 public:
  TomlReader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_space();
        std::vector<std::string> path{read_key()};
        skip_space();
        while (peek() == '.') {
          ++pos_;
          skip_space();
          path.push_back(read_key());
          skip_space();
        }
        expect(']');
        table = &root;
        for (const auto& part : path) {
          json& next = (*table)[part];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("'" + part + "' is already a value");
          table = &next;
        }
      } else {
        const std::string key = read_key();
        skip_space();
        expect('=');
        skip_space();
        if (table->contains(key)) fail("duplicate key '" + key + "'");
        (*table)[key] = read_value();
      }
      end_of_line();
    }
    return root;
  }

 private:
  const std::string& text_;
  std::string source_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  int line() const {
    int n = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) n += text_[i] == '\n';
    return n;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line()), what);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_space() {
    while (peek() == ' ' || peek() == '\t') ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_space();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (!eof() && peek() != '\n') fail("unexpected trailing characters");
  }

  std::string read_key() {
    if (peek() == '"') return read_string();
    std::string key;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-') key += text_[pos_++];
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::string read_string() {
    expect('"');
    std::string out;
    while (peek() != '"') {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = text_[pos_++];
      if (c == '\\') {
        char e = text_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    ++pos_;
    return out;
  }

  json read_value() {
    const char c = peek();
    if (c == '"') return read_string();
    if (c == '[') return read_array();
    if (text_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (text_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    return read_number();
  }

  json read_array() {
    expect('[');
    json arr = json::array();
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(read_value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']'");
      }
    }
  }

  json read_number() {
    std::string raw;
    while (!eof()) {
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E' ||
          c == '_') {
        if (c != '_') raw += c;
        ++pos_;
      } else {
        break;
      }
    }
    if (raw.empty()) fail("expected a value");
    const bool is_float = raw.find_first_of(".eE") != std::string::npos;
    char* end = nullptr;
    if (is_float) {
      const double v = std::strtod(raw.c_str(), &end);
      if (*end != '\0') fail("malformed number '" + raw + "'");
      return v;
    }
    const long long v = std::strtoll(raw.c_str(), &end, 10);
    if (*end != '\0') fail("malformed integer '" + raw + "'");
    return v;
  }
};

std::string kind_of(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "table";
  return "null";
}

bool compatible(const json& expected, const json& got) {
  if (expected.is_number_float()) return got.is_number();
  if (expected.is_number_integer()) return got.is_number_integer();
  if (expected.is_array()) {
    if (!got.is_array()) return false;
    for (const auto& e : got) {
      if (!e.is_number()) return false;
    }
    return true;
  }
  return kind_of(expected) == kind_of(got);
}

void merge(json& target, const json& user, const std::string& prefix) {
  if (!user.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected a table");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!target.contains(it.key())) throw ConfigError(path, "unknown key");
    json& slot = target[it.key()];
    if (slot.is_object()) {
      merge(slot, it.value(), path);
    } else if (!compatible(slot, it.value())) {
      throw ConfigError(path, "expected " + kind_of(slot) + ", got " + kind_of(it.value()));
    } else {
      slot = slot.is_number_float() ? json(it.value().get<double>()) : it.value();
    }
  }
}

void env_walk(json& node, const std::string& prefix, const std::string& path) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    std::string name = prefix + "_" + it.key();
    for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const std::string field = path.empty() ? it.key() : path + "." + it.key();
    if (it.value().is_object()) {
      env_walk(it.value(), name, field);
      continue;
    }
    const char* raw = std::getenv(name.c_str());
    if (!raw) continue;
    json parsed;
    if (it.value().is_string()) {
      parsed = std::string(raw);
    } else {
      parsed = parse_toml(std::string("v = ") + raw, name)["v"];
    }
    if (!compatible(it.value(), parsed)) {
      throw ConfigError(field, "environment override " + name + " has the wrong type");
    }
    it.value() = it.value().is_number_float() ? json(parsed.get<double>()) : parsed;
  }
}

}  // namespace

json parse_toml(const std::string& text, const std::string& source) {
  return TomlReader(text, source).parse();
}

const json& default_config() {
  static const json defaults = json::parse(R"({
    "run":       {"seed": 1, "threads": 1, "deterministic": false, "out_dir": "out"},
    "model":     {"kind": "doubling", "lengths": []},
    "roof":      {"constant": 1.0, "cos": [0.3], "sin": []},
    "potential": {"constant": 0.0, "cos": [], "sin": []},
    "cocycle":   {"group": "SO2", "kind": "angle", "winding": 1,
                  "angle": {"constant": 0.0, "cos": [], "sin": [1.0]},
                  "x": {"constant": 0.0, "cos": [0.7], "sin": []},
                  "y": {"constant": 0.0, "cos": [], "sin": [0.5]},
                  "z": {"constant": 0.0, "cos": [], "sin": []}},
    "group":     {"max_frequency": 8, "max_spin": 3.0, "mesh": 64},
    "thermo":    {"grid": 1024, "tol": 1e-12},
    "transfer":  {"iterations": 40, "im_z": [0.0, 1.0, 10.0, 100.0], "family": 5},
    "access":    {"depth": 20, "past_length": 6, "points": 256, "vector_mesh": 80, "coverage": 0.95},
    "dolgopyat": {"steps": 10, "im_z": 10.0, "depth_cap": 8},
    "correlate": {"samples": 1000000, "tmax": 20.0, "dt": 0.5, "k": 1, "shards": 16, "batches": 8}
  })");
  return defaults;
}

json validate_config(const json& user) {
  json merged = default_config();
  merge(merged, user, "");
  const json& c = merged;
  auto positive = [&](const char* table, const char* key) {
    if (!(c[table][key].get<double>() > 0)) throw ConfigError(std::string(table) + "." + key, "must be positive");
  };
  positive("thermo", "grid");
  positive("thermo", "tol");
  positive("transfer", "iterations");
  positive("access", "depth");
  positive("access", "points");
  positive("correlate", "samples");
  positive("correlate", "tmax");
  positive("correlate", "dt");
  positive("correlate", "shards");
  positive("correlate", "batches");
  const int grid = c["thermo"]["grid"].get<int>();
  if (grid < 64 || (grid & (grid - 1)) != 0) throw ConfigError("thermo.grid", "must be a power of two >= 64");
  const int k = c["correlate"]["k"].get<int>();
  if (k < 1 || k > 2) throw ConfigError("correlate.k", "only k = 1 and k = 2 are supported");
  const std::string group = c["cocycle"]["group"];
  if (group != "SO2" && group != "SU2") throw ConfigError("cocycle.group", "must be SO2 or SU2");
  const std::string kind = c["cocycle"]["kind"];
  if (kind != "angle" && kind != "winding" && kind != "trivial" && kind != "exp") {
    throw ConfigError("cocycle.kind", "must be one of angle, winding, trivial, exp");
  }
  if ((kind == "angle" || kind == "winding") && group != "SO2") throw ConfigError("cocycle.kind", kind + " needs SO2");
  if (kind == "exp" && group != "SU2") throw ConfigError("cocycle.kind", "exp needs SU2");
  const std::string model = c["model"]["kind"];
  if (model != "doubling" && model != "tripling" && model != "lengths") {
    throw ConfigError("model.kind", "must be one of doubling, tripling, lengths");
  }
  if (model == "lengths" && c["model"]["lengths"].size() < 2) {
    throw ConfigError("model.lengths", "at least two branch lengths are needed");
  }
  return merged;
}

void apply_env_overrides(json& config) { env_walk(config, "SKEWMIX", ""); }

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  json user;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    try {
      user = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(path, e.what());
    }
  } else {
    user = parse_toml(ss.str(), path);
  }
  json merged = validate_config(user);
  apply_env_overrides(merged);
  return validate_config(merged);
}

std::uint64_t config_hash(const json& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace skewmix
