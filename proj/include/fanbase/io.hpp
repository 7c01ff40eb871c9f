#pragma once

#include <string>

namespace fanbase {

/// Shortest decimal text that parses back to exactly this double.
std::string format_double(double value);

/// Writes content to path via a temporary file in the same directory plus
/// an atomic rename, creating parent directories as needed. Concurrent
/// writers can never expose a partial file. Throws IoError.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace fanbase
