#pragma once

#include <string>

#include "scenarios.hpp"

namespace rltool {

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

/// RFC 4180 text: fields with commas, quotes or line breaks are quoted.
std::string to_csv(const CsvTable& t);

}  // namespace rltool
