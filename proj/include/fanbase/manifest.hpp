#pragma once

#include <string>
#include <vector>

namespace fanbase {

/// Half-open clock interval [start_minute, end_minute) in minutes since
/// midnight, 0 <= start < end <= 1440.
struct ClockSpan {
  int start_minute = 0;
  int end_minute = 1440;

  bool operator==(const ClockSpan&) const = default;
};

/// A demand-response test window as written in the manifest: a labeled
/// clock interval. The settling period is appended separately when the
/// window is converted to slots.
struct WindowSpec {
  std::string label;
  ClockSpan span;
};

/// Parsed dataset manifest. Paths are as written; callers resolve data_path
/// relative to the manifest's directory.
struct Manifest {
  std::string building;
  std::string data_path;
  std::vector<std::string> fans;
  std::vector<std::string> baseline_days;  // ISO dates, strictly increasing
  std::string event_day;
  std::vector<WindowSpec> windows;
  int settling_minutes = 60;
  ClockSpan day_mode{0, 1440};
};

/// "HH:MM" -> minutes since midnight. Throws ParseError.
int parse_clock_minutes(const std::string& text);

/// Minutes since midnight -> "HH:MM" (1440 prints as 24:00).
std::string format_clock_minutes(int minutes);

/// "HH:MM-HH:MM" -> half-open span; 24:00 is allowed as an end. Throws
/// ParseError on malformed text or an empty span.
ClockSpan parse_clock_span(const std::string& text);

/// Reads a key = value manifest (strings quoted, lists in brackets, #
/// comments). Required keys: data, fans, baseline_days, event_day, windows.
/// Optional: building, settling_minutes (default 60), day_mode (default the
/// whole day). Window entries are "label HH:MM-HH:MM". Throws ParseError
/// with the offending line number, IoError if unreadable.
Manifest parse_manifest(const std::string& path);

/// Writes the manifest in the same format parse_manifest reads.
std::string format_manifest(const Manifest& manifest);

}  // namespace fanbase
