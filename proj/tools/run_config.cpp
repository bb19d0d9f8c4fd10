#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bteb/errors.hpp"

namespace bteb::cli {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw UsageError("invalid value for " + key + ": '" + value + "'");
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  T out{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, text);
  return out;
}

}  // namespace

const std::vector<std::string>& Settings::known_keys() {
  static const std::vector<std::string> keys = {
      "r",       "n",       "reps",    "seed",    "grid_m",  "tail_eps", "prior.kind",
      "prior.a", "prior.b", "prior.v", "prior.w", "qzero_convention", "cap"};
  return keys;
}

void Settings::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw UsageError("unknown config key: " + key);
  }
  // Lists are stored without blanks so the metadata echo stays one token.
  std::string compact;
  for (const char c : value) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  }
  if (compact.empty()) throw UsageError("empty value for config key: " + key);
  values_[key] = compact;
}

std::string Settings::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("missing config key: " + key);
  return it->second;
}

std::optional<std::string> Settings::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

int Settings::get_int(const std::string& key) const { return parse_integer<int>(key, get(key)); }

std::int64_t Settings::get_int64(const std::string& key) const {
  return parse_integer<std::int64_t>(key, get(key));
}

std::uint64_t Settings::get_uint64(const std::string& key) const {
  return parse_integer<std::uint64_t>(key, get(key));
}

double Settings::get_double(const std::string& key) const {
  const std::string text = get(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) bad_value(key, text);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, text);
  }
}

std::vector<std::int64_t> Settings::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  std::stringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_integer<std::int64_t>(key, trim(item)));
  if (out.empty()) bad_value(key, get(key));
  return out;
}

std::string Settings::echo(const std::vector<std::string>& keys) const {
  std::string out;
  for (const auto& k : keys) {
    const auto v = find(k);
    if (!v) continue;
    if (!out.empty()) out += ' ';
    out += k + "=" + *v;
  }
  return out;
}

Prior Settings::prior() const {
  const std::string kind = get("prior.kind");
  if (kind == "uniform") return Prior::uniform(get_double("prior.a"), get_double("prior.b"));
  if (kind == "beta") return Prior::beta(get_double("prior.v"), get_double("prior.w"));
  throw UsageError("prior.kind must be uniform or beta (got '" + kind + "')");
}

QZeroConvention Settings::qzero() const { return parse_qzero(get("qzero_convention")); }

Settings default_settings() {
  Settings s;
  s.set("r", "3");
  s.set("n", "100,500");
  s.set("reps", "10");
  s.set("seed", "1");
  s.set("grid_m", "2000");
  s.set("tail_eps", "1e-12");
  s.set("prior.kind", "uniform");
  s.set("prior.a", "0.5");
  s.set("prior.b", "0.8");
  s.set("qzero_convention", "one");
  return s;
}

void load_config_file(const std::filesystem::path& path, Settings& into) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    into.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::vector<std::int64_t> read_history_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open history file: " + path.string());
  std::vector<std::int64_t> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::int64_t v = 0;
    const auto* end = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(line.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": not an integer");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("history file has no observations: " + path.string());
  return out;
}

}  // namespace bteb::cli
