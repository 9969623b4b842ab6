#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace lgtsim {

// Arithmetic on numbers and the constant pi: + - * / and parentheses.
inline real eval_expression(const std::string& text) {
  struct Parser {
    const std::string& s;
    std::size_t i = 0;
    void skip() {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    real expr() {
      real v = term();
      for (skip(); i < s.size() && (s[i] == '+' || s[i] == '-'); skip()) {
        const char op = s[i++];
        const real r = term();
        v = op == '+' ? v + r : v - r;
      }
      return v;
    }
    real term() {
      real v = factor();
      for (skip(); i < s.size() && (s[i] == '*' || s[i] == '/'); skip()) {
        const char op = s[i++];
        const real r = factor();
        if (op == '/' && r == 0.0) throw invalid_parameter("division by zero in: " + s);
        v = op == '*' ? v * r : v / r;
      }
      return v;
    }
    real factor() {
      skip();
      if (i >= s.size()) throw invalid_parameter("incomplete expression: " + s);
      if (s[i] == '-') {
        ++i;
        return -factor();
      }
      if (s[i] == '+') {
        ++i;
        return factor();
      }
      if (s[i] == '(') {
        ++i;
        const real v = expr();
        skip();
        if (i >= s.size() || s[i] != ')') throw invalid_parameter("missing ')' in: " + s);
        ++i;
        return v;
      }
      if (s.compare(i, 2, "pi") == 0) {
        i += 2;
        return pi;
      }
      std::size_t used = 0;
      real v = 0.0;
      try {
        v = std::stod(s.substr(i), &used);
      } catch (...) {
        throw invalid_parameter("bad number in: " + s);
      }
      i += used;
      return v;
    }
  } p{text};
  const real v = p.expr();
  p.skip();
  if (p.i != text.size()) throw invalid_parameter("trailing characters in: " + text);
  return v;
}

// Flat key = value configuration; later assignments override earlier ones.
class Config {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw invalid_parameter("missing config key: " + key);
    return it->second;
  }
  std::string str(const std::string& key, const std::string& def) const { return has(key) ? str(key) : def; }

  real num(const std::string& key) const {
    try {
      return eval_expression(str(key));
    } catch (const invalid_parameter& e) {
      throw invalid_parameter("config key " + key + ": " + e.what());
    }
  }
  real num(const std::string& key, real def) const { return has(key) ? num(key) : def; }

  int integer(const std::string& key) const {
    const real v = num(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw invalid_parameter("config key " + key + " must be an integer");
    return static_cast<int>(v);
  }
  int integer(const std::string& key, int def) const { return has(key) ? integer(key) : def; }

  std::vector<real> list(const std::string& key) const {
    std::vector<real> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ','))
      if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(eval_expression(item));
    if (out.empty()) throw invalid_parameter("config key " + key + " is an empty list");
    return out;
  }
  std::vector<int> int_list(const std::string& key) const {
    std::vector<int> out;
    for (real v : list(key)) {
      if (v != std::floor(v)) throw invalid_parameter("config key " + key + " must list integers");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  // Rejects keys outside the allowed set.
  void check_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
      if (!allowed.count(k)) throw invalid_parameter("unknown config key: " + k);
  }

 private:
  std::map<std::string, std::string> values_;
};

inline const std::map<std::string, std::string>& builtin_presets() {
  static const std::map<std::string, std::string> p = {
      {"fig4",
       "experiment = ahm-quench\n"
       "d = 3\n"
       "lambda_E = 4*pi/9\n"
       "lambda_B = 0.5\n"
       "lambda_M = 0.5\n"
       "lambda_J = 2*pi/9\n"
       "order = 2\n"
       "dt = 4/55\n"
       "steps = 55\n"
       "backend = both\n"
       "output = fig4_energies.csv\n"},
      {"fig5",
       "experiment = d-scaling\n"
       "d_list = 3,4,5,6\n"
       "lambda_E = 4*pi/9\n"
       "lambda_B = 2\n"
       "lambda_M = 0.5\n"
       "lambda_J = 2*pi/9\n"
       "t_max = 4\n"
       "samples = 41\n"
       "backend = exact\n"
       "output = fig5_energies.csv\n"},
      {"resources-ahm",
       "experiment = resources\n"
       "d = 3\n"
       "lambda_E = 4*pi/9\n"
       "lambda_B = 0.5\n"
       "lambda_M = 0.5\n"
       "lambda_J = 2*pi/9\n"
       "dt = 4/55\n"
       "chain_N = 8\n"
       "gate_fidelity = 0.996\n"
       "fidelity_threshold = 0.9\n"
       "output = resources.json\n"},
      {"baryon-prep",
       "experiment = baryon-prep\n"
       "N = 4\n"
       "mu = 1.0\n"
       "x = 0.8\n"
       "blocks = 5\n"
       "max_evals = 1500\n"
       "seed = 12345\n"
       "ramp_dt = 0.1\n"
       "ramp_steps = 25\n"
       "ramp_max_doublings = 4\n"
       "output = baryon\n"},
      {"hadronic",
       "experiment = hadronic-tensor\n"
       "N = 4\n"
       "mu = 1.0\n"
       "x = 0.8\n"
       "mu_index = 0\n"
       "nu_index = 0\n"
       "t_max = 10\n"
       "t_step = 0.1\n"
       "dt = 0.02\n"
       "backend = both\n"
       "omega_max = 10\n"
       "omega_samples = 101\n"
       "window = rectangular\n"
       "output = hadronic\n"},
  };
  return p;
}

inline void parse_config_into(Config& cfg, const std::string& text, const std::filesystem::path& base, int depth) {
  if (depth > 8) throw invalid_parameter("include nesting too deep");
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("@include", 0) == 0) {
      const std::string target = trim(line.substr(8));
      if (target.rfind("preset:", 0) == 0) {
        const std::string name = target.substr(7);
        auto it = builtin_presets().find(name);
        if (it == builtin_presets().end()) throw invalid_parameter("unknown preset: " + name);
        parse_config_into(cfg, it->second, base, depth + 1);
      } else {
        const auto path = base / target;
        std::ifstream in(path);
        if (!in) throw invalid_parameter("cannot open included file: " + path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        parse_config_into(cfg, buf.str(), path.parent_path(), depth + 1);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_parameter("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw invalid_parameter("line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, value);
  }
}

inline Config parse_config(const std::string& text, const std::filesystem::path& base = ".") {
  Config cfg;
  parse_config_into(cfg, text, base, 0);
  return cfg;
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw invalid_parameter("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace lgtsim
