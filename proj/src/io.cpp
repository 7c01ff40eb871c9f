#include "fanbase/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "fanbase/errors.hpp"

namespace fanbase {

std::string format_double(double value) {
  char buf[64];
  const std::to_chars_result r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) fail(ErrorCode::IoError, "cannot create directory '" + target.parent_path().string() +
                                         "': " + ec.message());
  }
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open '" + temp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCode::IoError, "failed writing '" + temp.string() + "'");
  }
  fs::rename(temp, target, ec);
  if (ec) fail(ErrorCode::IoError, "cannot move '" + temp.string() + "' into place: " + ec.message());
}

}  // namespace fanbase
