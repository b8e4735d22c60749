#pragma once

// CSV output with a commented header block, path CSV round-trips, key = value
// config files, and run manifests with FNV-1a digests of every output.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spotvol/fourier.hpp"

namespace spotvol::io {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "1.0.0";

// Shortest round-trip decimal form.
std::string fmt(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string file_digest(const fs::path& file);  // 16 hex digits

using Meta = std::vector<std::pair<std::string, std::string>>;

class CsvWriter {
public:
  CsvWriter(const fs::path& file, const Meta& meta, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  const fs::path& path() const { return path_; }

private:
  fs::path path_;
  std::ofstream out_;
  std::size_t width_;
};

// Creates the directory if needed and checks that it accepts files.
void ensure_writable_dir(const fs::path& dir);

// Columns timestamp,logprice. The horizon comes from a `# horizon_seconds:`
// header line when present, else from the last timestamp.
void write_path_csv(const fs::path& file, const PricePath& path, const Meta& meta = {});
PricePath read_path_csv(const fs::path& file);

// `key = value` lines ('#' comments), or a run manifest (JSON) whose "config"
// object is returned. `command` receives the manifest's command when present.
std::map<std::string, std::string> read_config(const fs::path& file, std::string* command = nullptr);

struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::vector<fs::path> outputs;
  // Free-form extra fields (already JSON-encoded values).
  std::vector<std::pair<std::string, std::string>> extra_json;
};

// Writes manifest.json into `dir`; output paths are stored relative to it.
fs::path write_manifest(const fs::path& dir, const Manifest& m);

std::vector<double> parse_list(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

}  // namespace spotvol::io
