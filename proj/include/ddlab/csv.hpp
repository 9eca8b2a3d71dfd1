#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ddlab::csv {

// All floating-point output uses 17 significant digits so that parsing a
// cell back yields the identical 64-bit value (and re-serializing yields
// the identical byte sequence).
std::string format(double v);
std::string format(long v);

// A CSV document kept as raw cells; rows may have different arity (the
// double-descent report appends a one-line summary after the data rows).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

void write_file(const std::filesystem::path& path, const Table& table);
Table read_file(const std::filesystem::path& path);

}  // namespace ddlab::csv
