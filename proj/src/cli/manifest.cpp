#include "manifest.hpp"

#include "ifbls/cli.hpp"
#include "ifbls/data_io.hpp"
#include "ifbls/error.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

namespace ifbls::cli {

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), timestamp_(utc_now()) {}

void RunManifest::add_seed(const std::string& name, unsigned long long value) {
  seeds_[name] = value;
}

void RunManifest::add_dataset(const std::filesystem::path& path) {
  datasets_.push_back({{"path", path.string()}, {"fnv1a64", content_fingerprint(path)}});
}

void RunManifest::add_artifact(const std::filesystem::path& path) { artifacts_.push_back(path); }

std::filesystem::path RunManifest::manifest_path_for(const std::filesystem::path& artifact) {
  auto p = artifact;
  p += ".manifest.json";
  return p;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "ifbls";
  j["version"] = kToolVersion;
  j["command"] = command_;
  j["argv"] = argv_;
  j["timestamp"] = timestamp_;
  j["config"] = config_;
  j["seeds"] = seeds_;
  j["datasets"] = datasets_;
  auto artifacts = nlohmann::ordered_json::array();
  for (const auto& a : artifacts_) {
    artifacts.push_back({{"path", a.string()}, {"fnv1a64", content_fingerprint(a)}});
  }
  j["artifacts"] = artifacts;
  return j;
}

void RunManifest::write_all() const {
  const auto text = to_json().dump(2) + "\n";
  for (const auto& a : artifacts_) {
    const auto path = manifest_path_for(a);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot write '" + path.string() + "'");
    out << text;
  }
}

}  // namespace ifbls::cli
