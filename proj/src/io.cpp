#include "spotvol/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "spotvol/errors.hpp"

namespace spotvol::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const std::string t = trim(s);
  const char* b = t.data();
  if (!t.empty() && *b == '+') ++b;
  const auto r = std::from_chars(b, t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ValidationError("cannot parse " + what + " '" + t + "'");
  }
  return v;
}

}  // namespace

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_digest(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(ss.str())));
  return buf;
}

CsvWriter::CsvWriter(const fs::path& file, const Meta& meta, const std::vector<std::string>& columns)
    : path_(file), out_(file), width_(columns.size()) {
  if (!out_) throw ValidationError("cannot write " + file.string());
  for (const auto& [k, v] : meta) out_ << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  require(cells.size() == width_, "CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
  if (!out_) throw ValidationError("write failed for " + path_.string());
}

void ensure_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ValidationError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".spotvol_write_probe";
  {
    std::ofstream p(probe);
    if (!p) throw ValidationError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

void write_path_csv(const fs::path& file, const PricePath& path, const Meta& meta) {
  Meta m = meta;
  m.emplace_back("horizon_seconds", fmt(path.horizon));
  m.emplace_back("units", "timestamp in seconds from the start of the session, natural log price");
  CsvWriter w(file, m, {"timestamp", "logprice"});
  for (std::size_t i = 0; i < path.timestamps.size(); ++i) {
    w.row({fmt(path.timestamps[i]), fmt(path.logprices[i])});
  }
}

PricePath read_path_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open " + file.string());
  PricePath p;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  double horizon = -1.0;
  std::size_t ts_col = 0, lp_col = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto colon = t.find(':');
      if (colon != std::string::npos && trim(t.substr(1, colon - 1)) == "horizon_seconds") {
        horizon = to_double(t.substr(colon + 1), "horizon");
      }
      continue;
    }
    const std::vector<std::string> f = split(t, ',');
    if (!header) {
      header = true;
      ts_col = lp_col = f.size();
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (trim(f[i]) == "timestamp") ts_col = i;
        if (trim(f[i]) == "logprice") lp_col = i;
      }
      if (ts_col == f.size() || lp_col == f.size()) {
        throw ValidationError(file.string() + ": header must name timestamp and logprice columns");
      }
      continue;
    }
    if (f.size() <= std::max(ts_col, lp_col)) {
      throw ValidationError(file.string() + ": short row at line " + std::to_string(lineno));
    }
    p.timestamps.push_back(to_double(f[ts_col], "timestamp at line " + std::to_string(lineno)));
    p.logprices.push_back(to_double(f[lp_col], "log price at line " + std::to_string(lineno)));
  }
  if (p.timestamps.empty()) throw ValidationError(file.string() + ": no observations");
  p.horizon = horizon > 0.0 ? horizon : p.timestamps.back();
  p.validate();
  return p;
}

std::map<std::string, std::string> read_config(const fs::path& file, std::string* command) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::map<std::string, std::string> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("malformed manifest " + file.string() + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw ValidationError("manifest " + file.string() + " has no config object");
    }
    for (const auto& [k, v] : j["config"].items()) {
      out[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    if (command && j.contains("command") && j["command"].is_string()) {
      *command = j["command"].get<std::string>();
    }
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": empty key");
    }
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

fs::path write_manifest(const fs::path& dir, const Manifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["version"] = kVersion;
  j["seed"] = m.seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json outs = nlohmann::ordered_json::object();
  for (const fs::path& p : m.outputs) {
    outs[fs::relative(p, dir).generic_string()] = file_digest(p);
  }
  j["outputs"] = outs;
  for (const auto& [k, v] : m.extra_json) j[k] = nlohmann::ordered_json::parse(v);
  const fs::path file = dir / "manifest.json";
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write " + file.string());
  out << j.dump(2) << '\n';
  return file;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& part : split(s, ',')) {
    if (trim(part).empty()) continue;
    out.push_back(to_double(part, "list value"));
  }
  if (out.empty()) throw ValidationError("empty list '" + s + "'");
  return out;
}

}  // namespace spotvol::io
