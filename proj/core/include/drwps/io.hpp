#pragma once

#include <string>

namespace drwps {

// Whole-file read/write. Both throw IoError naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace drwps
