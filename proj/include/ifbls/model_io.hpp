#pragma once

#include "ifbls/trainer.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace ifbls {

inline constexpr int kModelFormatVersion = 1;

/// Text model format: a versioned header followed by `key value` lines and
/// named matrix blocks. Floats are written as C99 hex floats so a load
/// reproduces every bit. Lines starting with '#' are comments.
void write_model(std::ostream& out, const TrainedModel& model,
                 const std::map<std::string, std::string>& comments = {});
TrainedModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const TrainedModel& model,
                const std::map<std::string, std::string>& comments = {});
TrainedModel load_model(const std::filesystem::path& path);

std::string hex_double(double v);
double parse_hex_double(const std::string& s);

}  // namespace ifbls
