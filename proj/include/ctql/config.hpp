#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ctql {

/// Flat key=value configuration. Files are plain text, one `key=value` per
/// line, `#` starts a comment, later occurrences of a key override earlier
/// ones. All values are kept as strings until a typed getter is called.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_long(const std::string& key, long fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

  /// Throws config_error naming the first key that is not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

  /// Canonical "key=value\n" text with keys sorted; fingerprint input.
  std::string canonical() const;

  /// FNV-1a 64-bit hash of canonical(), as 16 hex digits. Stable under key
  /// reordering by construction.
  std::string fingerprint() const;

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace ctql
