#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

namespace meshres::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string read_text(const fs::path& path);
// Writes through a temporary file and a rename.
void write_text(const fs::path& path, std::string_view text);
void write_with(const fs::path& path, const std::function<void(std::ostream&)>& fill);

// Throws Error when the run directory or one of its files is missing.
void require_dir(const fs::path& dir, std::string_view what);
fs::path require_file(const fs::path& dir, std::string_view name);

// manifest.json of a run or bundle directory: the one place for
// timestamps and timings. Each step records its effective configuration.
void record_step(const fs::path& dir, std::string_view step, Json config, Json timing);

}  // namespace meshres::cli
