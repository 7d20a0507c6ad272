#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ifbls::cli {

/// Provenance record written next to every artifact as `<artifact>.manifest.json`.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
  void add_seed(const std::string& name, unsigned long long value);
  void add_dataset(const std::filesystem::path& path);
  void add_artifact(const std::filesystem::path& path);

  /// Writes one manifest per artifact registered so far.
  void write_all() const;
  nlohmann::ordered_json to_json() const;

  static std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::string timestamp_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json seeds_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json datasets_ = nlohmann::ordered_json::array();
  std::vector<std::filesystem::path> artifacts_;
};

}  // namespace ifbls::cli
