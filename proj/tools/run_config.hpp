#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bteb/eb_estimator.hpp"
#include "bteb/prior.hpp"

namespace bteb::cli {

// Flat key-value settings with dotted keys. Later sources override earlier
// ones: built-in defaults, then the config file, then command-line flags.
class Settings {
 public:
  static const std::vector<std::string>& known_keys();

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  int get_int(const std::string& key) const;
  std::int64_t get_int64(const std::string& key) const;
  std::uint64_t get_uint64(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;

  // "key=value" pairs in key order, space separated.
  std::string echo(const std::vector<std::string>& keys) const;

  Prior prior() const;
  QZeroConvention qzero() const;

 private:
  std::map<std::string, std::string> values_;
};

Settings default_settings();

/// Reads `key = value` lines; '#' starts a comment. Throws UsageError on a
/// missing file, malformed line or unknown key.
void load_config_file(const std::filesystem::path& path, Settings& into);

/// One integer per line; blank lines and '#' comments are skipped.
std::vector<std::int64_t> read_history_file(const std::filesystem::path& path);

}  // namespace bteb::cli
