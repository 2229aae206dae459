#include "chemo/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "chemo/error.hpp"

namespace chemo {
namespace {

std::string trim(std::string s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw Error(Errc::ConfigError, "key '" + key + "': not a number: '" + v + "'");
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(Errc::ConfigError, where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(Errc::ConfigError, where + ": empty key");
    if (!cfg.values_.emplace(key, value).second) {
      throw Error(Errc::ConfigError, where + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(Errc::ConfigError, origin_ + ": missing key '" + key + "'");
  return it->second;
}

double KeyValueConfig::number(const std::string& key) const { return to_double(key, raw(key)); }

double KeyValueConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long KeyValueConfig::integer(const std::string& key) const {
  const std::string& v = raw(key);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(Errc::ConfigError, "key '" + key + "': not an integer: '" + v + "'");
  }
  return out;
}

long long KeyValueConfig::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string KeyValueConfig::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

std::vector<double> KeyValueConfig::number_list(const std::string& key) const {
  std::vector<double> out;
  std::string item;
  std::istringstream in(raw(key));
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty()) throw Error(Errc::ConfigError, "key '" + key + "': empty list");
  return out;
}

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (!allowed.count(k)) throw Error(Errc::ConfigError, origin_ + ": unknown key '" + k + "'");
  }
}

Mode parse_mode(const std::string& s) {
  if (s == "blowup") return Mode::Blowup;
  if (s == "simulate") return Mode::Simulate;
  throw Error(Errc::ConfigError, "mode must be blowup or simulate, got '" + s + "'");
}

std::string to_string(Mode m) { return m == Mode::Blowup ? "blowup" : "simulate"; }

ModelParams parse_model_params(const KeyValueConfig& cfg, Mode* mode_out) {
  ModelParams p;
  p.n = static_cast<int>(cfg.integer("n"));
  p.R = cfg.number("R");
  p.k = cfg.number("k");
  p.sigma = cfg.number("sigma");
  p.M_lo = cfg.number("M_lo");
  p.M_hi = cfg.number("M_hi");
  const Mode mode = parse_mode(cfg.text("mode", "blowup"));
  if (mode_out) *mode_out = mode;
  return validate_params(p, mode);
}

}  // namespace chemo
