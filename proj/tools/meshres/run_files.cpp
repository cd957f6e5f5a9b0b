#include "run_files.hpp"

#include <fstream>
#include <sstream>

#include "meshres/clock.hpp"
#include "meshres/error.hpp"

namespace meshres::cli {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_with(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    fill(out);
    if (!out) throw Error("write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

void write_text(const fs::path& path, std::string_view text) {
  write_with(path, [&](std::ostream& out) { out << text; });
}

void require_dir(const fs::path& dir, std::string_view what) {
  if (!fs::is_directory(dir)) throw Error(std::string(what) + " directory " + dir.string() + " does not exist");
}

fs::path require_file(const fs::path& dir, std::string_view name) {
  fs::path p = dir / name;
  if (!fs::is_regular_file(p)) {
    throw Error("missing " + p.string() + " (run the step that produces it first)");
  }
  return p;
}

void record_step(const fs::path& dir, std::string_view step, Json config, Json timing) {
  const fs::path path = dir / "manifest.json";
  Json manifest;
  if (fs::exists(path)) {
    try {
      manifest = Json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), e.byte);
    }
  }
  if (!manifest.contains("format")) manifest["format"] = "meshres-run/1";
  manifest["steps"][std::string(step)] = {
      {"created", utc_timestamp()}, {"config", std::move(config)}, {"timing", std::move(timing)}};
  write_text(path, manifest.dump(2) + "\n");
}

}  // namespace meshres::cli
