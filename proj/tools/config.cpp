#include "config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace shuffleagg::cli {

namespace {

struct Value {
  enum class Kind { Number, String, Bool, NumberList, StringList } kind;
  double num = 0.0;
  std::string str;
  bool boolean = false;
  std::vector<double> nums;
  std::vector<std::string> strs;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

Value parse_value(const std::string& raw, int line_no) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing value");
  Value v{};
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
    v.kind = Value::Kind::String;
    v.str = s.substr(1, s.size() - 2);
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = Value::Kind::Bool;
    v.boolean = (s == "true");
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']')
      throw ConfigError("line " + std::to_string(line_no) + ": unterminated list");
    const std::string inner = trim(s.substr(1, s.size() - 2));
    v.kind = Value::Kind::NumberList;
    if (inner.empty()) return v;
    std::stringstream ss(inner);
    std::string item;
    bool strings = false;
    while (std::getline(ss, item, ',')) {
      const std::string it = trim(item);
      if (!it.empty() && it.front() == '"') {
        if (it.size() < 2 || it.back() != '"')
          throw ConfigError("line " + std::to_string(line_no) + ": bad string in list");
        v.strs.push_back(it.substr(1, it.size() - 2));
        strings = true;
      } else {
        double num;
        if (!parse_number(it, &num))
          throw ConfigError("line " + std::to_string(line_no) + ": bad list item '" + it + "'");
        v.nums.push_back(num);
      }
    }
    if (strings && !v.nums.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": mixed list types");
    v.kind = strings ? Value::Kind::StringList : Value::Kind::NumberList;
    return v;
  }
  double num;
  if (!parse_number(s, &num))
    throw ConfigError("line " + std::to_string(line_no) + ": bad value '" + s + "'");
  v.kind = Value::Kind::Number;
  v.num = num;
  return v;
}

double require_number(const Value& v, const std::string& where) {
  if (v.kind != Value::Kind::Number) throw ConfigError(where + ": expected a number");
  return v.num;
}

int require_int(const Value& v, const std::string& where) {
  const double num = require_number(v, where);
  if (num != std::floor(num)) throw ConfigError(where + ": expected an integer");
  return static_cast<int>(num);
}

std::uint64_t require_u64(const Value& v, const std::string& where) {
  const double num = require_number(v, where);
  if (num < 0 || num != std::floor(num)) throw ConfigError(where + ": expected an unsigned integer");
  return static_cast<std::uint64_t>(num);
}

std::string require_string(const Value& v, const std::string& where) {
  if (v.kind != Value::Kind::String) throw ConfigError(where + ": expected a string");
  return v.str;
}

bool require_bool(const Value& v, const std::string& where) {
  if (v.kind != Value::Kind::Bool) throw ConfigError(where + ": expected true/false");
  return v.boolean;
}

std::vector<double> require_number_list(const Value& v, const std::string& where) {
  if (v.kind == Value::Kind::NumberList) return v.nums;
  if (v.kind == Value::Kind::Number) return {v.num};
  throw ConfigError(where + ": expected a list of numbers");
}

std::vector<std::string> require_string_list(const Value& v, const std::string& where) {
  if (v.kind == Value::Kind::StringList) return v.strs;
  if (v.kind == Value::Kind::String) return {v.str};
  if (v.kind == Value::Kind::NumberList && v.nums.empty()) return {};
  throw ConfigError(where + ": expected a list of strings");
}

void apply_kv(ExperimentConfig& cfg, const std::string& section, const std::string& key,
              const Value& v) {
  const std::string where = section.empty() ? key : section + "." + key;
  if (section.empty()) {
    if (key == "protocol") cfg.protocol = require_string(v, where);
    else if (key == "n") cfg.n = require_int(v, where);
    else if (key == "d") cfg.d = require_int(v, where);
    else if (key == "eps") cfg.eps = require_number(v, where);
    else if (key == "delta") cfg.delta = require_number(v, where);
    else if (key == "trials") cfg.trials = require_int(v, where);
    else if (key == "seed") cfg.seed = require_u64(v, where);
    else if (key == "input_family") cfg.input_family = require_string(v, where);
    else throw ConfigError("unknown key: " + where);
  } else if (section == "topology") {
    if (key == "mode") cfg.topology.mode = require_string(v, where);
    else if (key == "rate_limit") cfg.topology.rate_limit = require_int(v, where);
    else throw ConfigError("unknown key: " + where);
  } else if (section == "multi") {
    if (key == "level") cfg.multi.level = require_number(v, where);
    else if (key == "frame_seed") cfg.multi.frame_seed = require_u64(v, where);
    else if (key == "robust") cfg.multi.robust = require_bool(v, where);
    else throw ConfigError("unknown key: " + where);
  } else if (section == "custom") {
    if (key == "base") cfg.custom.base = require_string(v, where);
    else if (key == "stack") cfg.custom.stack = require_string_list(v, where);
    else if (key == "sigma") cfg.custom.sigma = require_number(v, where);
    else if (key == "shares") cfg.custom.shares = require_int(v, where);
    else if (key == "base_dim") cfg.custom.base_dim = require_int(v, where);
    else if (key == "lift_level") cfg.custom.lift_level = require_number(v, where);
    else throw ConfigError("unknown key: " + where);
  } else if (section == "sweep") {
    if (key == "n") cfg.sweep.n = require_number_list(v, where);
    else if (key == "d") cfg.sweep.d = require_number_list(v, where);
    else if (key == "eps") cfg.sweep.eps = require_number_list(v, where);
    else if (key == "delta") cfg.sweep.delta = require_number_list(v, where);
    else throw ConfigError("unknown key: " + where);
  } else if (section == "attack") {
    if (key == "kind") cfg.attack.kind = require_string(v, where);
    else if (key == "k") cfg.attack.k = require_int(v, where);
    else if (key == "rho") cfg.attack.rho = require_number(v, where);
    else if (key == "packing_size") cfg.attack.packing_size = require_int(v, where);
    else if (key == "attack_trials") cfg.attack.attack_trials = require_int(v, where);
    else if (key == "mc_samples") cfg.attack.mc_samples = require_int(v, where);
    else if (key == "probe_budget") cfg.attack.probe_budget = require_int(v, where);
    else throw ConfigError("unknown key: " + where);
  } else {
    throw ConfigError("unknown section: [" + section + "]");
  }
}

Value value_from_json(const nlohmann::json& j, const std::string& where) {
  Value v{};
  if (j.is_number()) {
    v.kind = Value::Kind::Number;
    v.num = j.get<double>();
  } else if (j.is_string()) {
    v.kind = Value::Kind::String;
    v.str = j.get<std::string>();
  } else if (j.is_boolean()) {
    v.kind = Value::Kind::Bool;
    v.boolean = j.get<bool>();
  } else if (j.is_array()) {
    bool strings = false;
    for (const auto& item : j) {
      if (item.is_string()) {
        v.strs.push_back(item.get<std::string>());
        strings = true;
      } else if (item.is_number()) {
        v.nums.push_back(item.get<double>());
      } else {
        throw ConfigError(where + ": unsupported list element");
      }
    }
    if (strings && !v.nums.empty()) throw ConfigError(where + ": mixed list types");
    v.kind = strings ? Value::Kind::StringList : Value::Kind::NumberList;
  } else {
    throw ConfigError(where + ": unsupported value type");
  }
  return v;
}

ExperimentConfig parse_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("json parse: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config JSON must be an object");
  ExperimentConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (value.is_object()) {
      for (const auto& [sub, subvalue] : value.items())
        apply_kv(cfg, key, sub, value_from_json(subvalue, key + "." + sub));
    } else {
      apply_kv(cfg, "", key, value_from_json(value, key));
    }
  }
  cfg.validate();
  return cfg;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(xs[i]);
  }
  return out + "]";
}

std::string fmt_list(const std::vector<std::string>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + xs[i] + "\"";
  }
  return out + "]";
}

}  // namespace

void ExperimentConfig::validate() const {
  if (protocol != "single" && protocol != "multi" && protocol != "custom")
    throw ConfigError("protocol must be single, multi or custom");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (d < 1) throw ConfigError("d must be >= 1");
  if (eps <= 0.0) throw ConfigError("eps must be positive");
  if (delta <= 0.0 || delta >= 1.0) throw ConfigError("delta must be in (0,1)");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (topology.mode != "single" && topology.mode != "per-coordinate")
    throw ConfigError("topology.mode must be single or per-coordinate");
  if (topology.rate_limit < 0) throw ConfigError("topology.rate_limit must be >= 0");
  if (input_family != "same-basis" && input_family != "same-random" &&
      input_family != "iid-uniform" && input_family != "worst")
    throw ConfigError("unknown input_family: " + input_family);
  for (const std::string& s : custom.stack)
    if (s != "rotate" && s != "coord" && s != "lift")
      throw ConfigError("unknown combinator: " + s);
  if (custom.base != "identity" && custom.base != "gaussian-shares" && custom.base != "single" &&
      custom.base != "multi")
    throw ConfigError("unknown custom.base: " + custom.base);
  if (attack.kind != "reconstruction" && attack.kind != "poisoning")
    throw ConfigError("attack.kind must be reconstruction or poisoning");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "protocol = \"" << protocol << "\"\n";
  out << "n = " << n << "\n";
  out << "d = " << d << "\n";
  out << "eps = " << fmt_double(eps) << "\n";
  out << "delta = " << fmt_double(delta) << "\n";
  out << "trials = " << trials << "\n";
  out << "seed = " << seed << "\n";
  out << "input_family = \"" << input_family << "\"\n";
  out << "\n[topology]\n";
  out << "mode = \"" << topology.mode << "\"\n";
  out << "rate_limit = " << topology.rate_limit << "\n";
  out << "\n[multi]\n";
  out << "level = " << fmt_double(multi.level) << "\n";
  out << "frame_seed = " << multi.frame_seed << "\n";
  out << "robust = " << (multi.robust ? "true" : "false") << "\n";
  out << "\n[custom]\n";
  out << "base = \"" << custom.base << "\"\n";
  out << "stack = " << fmt_list(custom.stack) << "\n";
  out << "sigma = " << fmt_double(custom.sigma) << "\n";
  out << "shares = " << custom.shares << "\n";
  out << "base_dim = " << custom.base_dim << "\n";
  out << "lift_level = " << fmt_double(custom.lift_level) << "\n";
  out << "\n[sweep]\n";
  out << "n = " << fmt_list(sweep.n) << "\n";
  out << "d = " << fmt_list(sweep.d) << "\n";
  out << "eps = " << fmt_list(sweep.eps) << "\n";
  out << "delta = " << fmt_list(sweep.delta) << "\n";
  out << "\n[attack]\n";
  out << "kind = \"" << attack.kind << "\"\n";
  out << "k = " << attack.k << "\n";
  out << "rho = " << fmt_double(attack.rho) << "\n";
  out << "packing_size = " << attack.packing_size << "\n";
  out << "attack_trials = " << attack.attack_trials << "\n";
  out << "mc_samples = " << attack.mc_samples << "\n";
  out << "probe_budget = " << attack.probe_budget << "\n";
  return out.str();
}

ExperimentConfig parse_config(const std::string& text) {
  // JSON documents start with '{'; everything else is the table format.
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') return parse_json(text);
    break;
  }

  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": bad section header");
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    apply_kv(cfg, section, key, parse_value(body.substr(eq + 1), line_no));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace shuffleagg::cli
