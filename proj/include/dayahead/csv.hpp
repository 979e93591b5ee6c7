#pragma once

#include <string>

namespace dayahead {

/// Fixed six-decimal rendering; -0 and sub-resolution noise print as 0.
std::string format_number(double value);

/// Writes `content` to `path`, creating parent directories. Throws Error
/// naming the path on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace dayahead
