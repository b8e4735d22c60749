#include "spotvol/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spotvol/errors.hpp"

namespace spotvol::ingest {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

}  // namespace

void SessionSpec::validate() const {
  require(close > open, "session close must be after open");
  require(expected_n >= 2, "session needs at least two grid intervals");
}

double parse_clock(const std::string& raw) {
  const std::string s = trim(raw);
  int hh = 0, mm = 0;
  double ss = 0.0;
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw ValidationError("malformed clock time '" + s + "'");
  }
  const std::string h = s.substr(0, c1), m = s.substr(c1 + 1, c2 - c1 - 1), sec = s.substr(c2 + 1);
  auto parse_int = [&](const std::string& part, int& v) {
    const auto r = std::from_chars(part.data(), part.data() + part.size(), v);
    return !part.empty() && r.ec == std::errc() && r.ptr == part.data() + part.size();
  };
  if (!parse_int(h, hh) || !parse_int(m, mm) || m.size() != 2 || sec.size() < 2 ||
      !parse_double(sec, ss) || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0.0 || ss >= 61.0) {
    throw ValidationError("malformed clock time '" + s + "'");
  }
  return hh * 3600.0 + mm * 60.0 + ss;
}

LoadResult load_ticks(std::istream& in, const SessionSpec& session) {
  session.validate();
  std::string line;
  std::size_t lineno = 0;
  // Skip leading blank lines and '#' comments before the header.
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    have_header = true;
    break;
  }
  if (!have_header) throw ValidationError("empty tick file");

  const std::vector<std::string> header = split_csv(line);
  std::size_t ts_col = header.size(), px_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = lower(header[i]);
    if (h == "timestamp" || h == "time") ts_col = i;
    if (h == "price") px_col = i;
  }
  if (ts_col == header.size() || px_col == header.size()) {
    throw ValidationError("header must name 'timestamp' and 'price' columns (line " +
                          std::to_string(lineno) + ")");
  }

  LoadResult out;
  double last_ts = -std::numeric_limits<double>::infinity();
  std::size_t last_line = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> f = split_csv(t);
    if (f.size() <= std::max(ts_col, px_col)) {
      out.rejected.push_back({lineno, "missing fields"});
      continue;
    }
    double ts = 0.0, px = 0.0;
    if (f[ts_col].find(':') != std::string::npos) {
      try {
        ts = parse_clock(f[ts_col]) - session.open;
      } catch (const ValidationError&) {
        out.rejected.push_back({lineno, "unparseable timestamp '" + f[ts_col] + "'"});
        continue;
      }
    } else if (!parse_double(f[ts_col], ts)) {
      out.rejected.push_back({lineno, "unparseable timestamp '" + f[ts_col] + "'"});
      continue;
    }
    if (!parse_double(f[px_col], px)) {
      out.rejected.push_back({lineno, "unparseable price '" + f[px_col] + "'"});
      continue;
    }
    if (px <= 0.0) {
      out.rejected.push_back({lineno, "nonpositive price"});
      continue;
    }
    if (ts < last_ts) {
      throw ValidationError("timestamps out of order at line " + std::to_string(lineno) +
                            " (previous record on line " + std::to_string(last_line) + ")");
    }
    last_ts = ts;
    last_line = lineno;
    out.ticks.push_back({ts, px});
  }
  return out;
}

LoadResult load_ticks_file(const std::filesystem::path& file, const SessionSpec& session) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open tick file " + file.string());
  try {
    return load_ticks(in, session);
  } catch (const ValidationError& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

PricePath resample_last_tick(const std::vector<TickRecord>& ticks, const SessionSpec& session) {
  session.validate();
  if (ticks.empty()) throw ValidationError("session has no ticks");
  for (std::size_t i = 1; i < ticks.size(); ++i) {
    require(ticks[i].timestamp >= ticks[i - 1].timestamp, "ticks must be in time order");
  }
  const std::size_t n = session.expected_n;
  const double step = session.step();
  const double tol = 1e-9 * step;
  PricePath p;
  p.horizon = session.length();
  p.timestamps.resize(n + 1);
  p.logprices.resize(n + 1);
  std::size_t j = 0;  // number of ticks at or before the current grid point
  for (std::size_t k = 0; k <= n; ++k) {
    const double g = k == n ? p.horizon : static_cast<double>(k) * step;
    while (j < ticks.size() && ticks[j].timestamp <= g + tol) ++j;
    const double price = j == 0 ? ticks.front().price : ticks[j - 1].price;
    p.timestamps[k] = g;
    p.logprices[k] = std::log(price);
  }
  return p;
}

bool is_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  const int month = std::stoi(s.substr(5, 2)), day = std::stoi(s.substr(8, 2));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::set<std::string> load_exclusions(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    if (!is_iso_date(t)) {
      throw ValidationError("exclusion list line " + std::to_string(lineno) +
                            ": expected YYYY-MM-DD, got '" + t + "'");
    }
    out.insert(t);
  }
  return out;
}

std::set<std::string> load_exclusions_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open exclusion list " + file.string());
  return load_exclusions(in);
}

std::vector<DayFile> list_days(const std::filesystem::path& dir,
                               const std::set<std::string>& excluded) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
  std::vector<DayFile> days;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.size() < 10 || !is_iso_date(stem.substr(0, 10))) continue;
    const std::string date = stem.substr(0, 10);
    if (excluded.count(date)) continue;
    days.push_back({date, entry.path()});
  }
  std::sort(days.begin(), days.end(), [](const DayFile& a, const DayFile& b) {
    return a.date != b.date ? a.date < b.date : a.path < b.path;
  });
  if (days.empty()) throw ValidationError("no dated CSV files in " + dir.string());
  return days;
}

}  // namespace spotvol::ingest
