#include "dayahead/csv.hpp"

#include "dayahead/common.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace dayahead {

std::string format_number(double value) {
  if (std::abs(value) < 5e-7) value = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error("write failed for " + path);
}

}  // namespace dayahead
