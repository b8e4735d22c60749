#pragma once

// Tick-data loading and last-tick resampling onto a regular session grid.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <set>
#include <string>
#include <vector>

#include "spotvol/fourier.hpp"

namespace spotvol::ingest {

struct TickRecord {
  double timestamp = 0.0;  // seconds since session open
  double price = 0.0;      // raw price
};

struct SessionSpec {
  double open = 9.5 * 3600.0;    // seconds after midnight
  double close = 16.0 * 3600.0;
  std::size_t expected_n = 23400;

  void validate() const;
  double length() const { return close - open; }
  double step() const { return length() / static_cast<double>(expected_n); }
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct LoadResult {
  std::vector<TickRecord> ticks;
  std::vector<RowError> rejected;
};

// HH:MM:SS or HH:MM:SS.fff to seconds after midnight.
double parse_clock(const std::string& s);

// Reads a CSV with a header naming `timestamp` and `price` columns (any order,
// extra columns ignored). Clock-formatted timestamps are converted to seconds
// since `session.open`; plain numbers are taken as already relative to it.
// Rows with unparseable fields or nonpositive prices are rejected and reported;
// decreasing timestamps abort the load.
LoadResult load_ticks(std::istream& in, const SessionSpec& session = {});
LoadResult load_ticks_file(const std::filesystem::path& file, const SessionSpec& session = {});

// Log of the last trade at or before each grid point k * step, k = 0..expected_n.
// Trades sharing a timestamp resolve to the last one in file order; grid points
// before the first trade take the first trade's price.
PricePath resample_last_tick(const std::vector<TickRecord>& ticks, const SessionSpec& session);

// One ISO date (YYYY-MM-DD) per line; blank lines and '#' comments allowed.
std::set<std::string> load_exclusions(std::istream& in);
std::set<std::string> load_exclusions_file(const std::filesystem::path& file);

struct DayFile {
  std::string date;  // YYYY-MM-DD from the file name
  std::filesystem::path path;
};

// CSV files in `dir` whose names start with an ISO date, sorted by date, minus
// the excluded dates.
std::vector<DayFile> list_days(const std::filesystem::path& dir,
                               const std::set<std::string>& excluded = {});

bool is_iso_date(const std::string& s);

}  // namespace spotvol::ingest
