#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace slicedot::check {

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

/// CSV text with every column whose header is "wall_ms" removed.
std::string strip_timing_columns(const std::string& csv);

/// Relative path -> contents for every regular file under dir. CSV files have
/// their timing columns stripped.
std::map<std::string, std::string> snapshot(const std::filesystem::path& dir);

/// JSON lines with the "wall_ms" key removed from every object.
std::string strip_timing_json(const std::string& lines);

}  // namespace slicedot::check
