#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ifbls::cli {

/// Flat `key = value` text grouped under `[section]` headers. Keys are stored
/// as "section.key"; keys before any header have no prefix.
class ConfigFile {
 public:
  ConfigFile() = default;
  static ConfigFile load(const std::filesystem::path& path);
  static ConfigFile parse(const std::string& text);

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace ifbls::cli
