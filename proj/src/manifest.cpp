#include "fanbase/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include "fanbase/errors.hpp"

namespace fanbase {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
  fail(ErrorCode::ParseError, "manifest line " + std::to_string(line) + ": " + what);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string parse_quoted(const std::string& value, std::size_t line) {
  if (value.size() < 2 || value.front() != '"' || value.back() != '"')
    line_error(line, "expected a quoted string, got '" + value + "'");
  const std::string inner = value.substr(1, value.size() - 2);
  if (inner.find('"') != std::string::npos) line_error(line, "nested quote in string");
  return inner;
}

std::vector<std::string> parse_string_list(const std::string& value, std::size_t line) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']')
    line_error(line, "expected a bracketed list");
  std::vector<std::string> items;
  std::string body = trim(value.substr(1, value.size() - 2));
  if (body.empty()) return items;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t comma = std::string::npos;
    bool quoted = false;
    for (std::size_t i = pos; i < body.size(); ++i) {
      if (body[i] == '"') quoted = !quoted;
      if (body[i] == ',' && !quoted) {
        comma = i;
        break;
      }
    }
    const std::string element = trim(body.substr(pos, comma == std::string::npos
                                                          ? std::string::npos
                                                          : comma - pos));
    items.push_back(parse_quoted(element, line));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return items;
}

int parse_integer(const std::string& value, std::size_t line) {
  try {
    std::size_t used = 0;
    const int parsed = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    line_error(line, "expected an integer, got '" + value + "'");
  }
}

bool plausible_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  const int month = std::stoi(s.substr(5, 2));
  const int day = std::stoi(s.substr(8, 2));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace

int parse_clock_minutes(const std::string& text) {
  if (text.size() != 5 || text[2] != ':' || !std::isdigit(static_cast<unsigned char>(text[0])) ||
      !std::isdigit(static_cast<unsigned char>(text[1])) ||
      !std::isdigit(static_cast<unsigned char>(text[3])) ||
      !std::isdigit(static_cast<unsigned char>(text[4])))
    fail(ErrorCode::ParseError, "bad clock time '" + text + "', expected HH:MM");
  const int hours = (text[0] - '0') * 10 + (text[1] - '0');
  const int minutes = (text[3] - '0') * 10 + (text[4] - '0');
  if (minutes > 59 || hours > 24 || (hours == 24 && minutes != 0))
    fail(ErrorCode::ParseError, "clock time '" + text + "' out of range");
  return hours * 60 + minutes;
}

std::string format_clock_minutes(int minutes) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

ClockSpan parse_clock_span(const std::string& text) {
  const std::size_t dash = text.find('-');
  if (dash == std::string::npos)
    fail(ErrorCode::ParseError, "bad clock span '" + text + "', expected HH:MM-HH:MM");
  ClockSpan span{parse_clock_minutes(text.substr(0, dash)),
                 parse_clock_minutes(text.substr(dash + 1))};
  if (span.start_minute >= span.end_minute)
    fail(ErrorCode::ParseError, "empty clock span '" + text + "'");
  return span;
}

Manifest parse_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open manifest '" + path + "'");

  Manifest m;
  bool saw_data = false, saw_fans = false, saw_baseline = false, saw_event = false,
       saw_windows = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) line_error(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) line_error(line_no, "expected key = value");

    if (key == "building") {
      m.building = parse_quoted(value, line_no);
    } else if (key == "data") {
      m.data_path = parse_quoted(value, line_no);
      saw_data = true;
    } else if (key == "fans") {
      m.fans = parse_string_list(value, line_no);
      saw_fans = true;
    } else if (key == "baseline_days") {
      m.baseline_days = parse_string_list(value, line_no);
      saw_baseline = true;
    } else if (key == "event_day") {
      m.event_day = parse_quoted(value, line_no);
      saw_event = true;
    } else if (key == "windows") {
      for (const std::string& entry : parse_string_list(value, line_no)) {
        const std::size_t space = entry.rfind(' ');
        if (space == std::string::npos || space == 0)
          line_error(line_no, "window entry '" + entry + "' is not 'label HH:MM-HH:MM'");
        WindowSpec w;
        w.label = trim(entry.substr(0, space));
        w.span = parse_clock_span(trim(entry.substr(space + 1)));
        m.windows.push_back(std::move(w));
      }
      saw_windows = true;
    } else if (key == "settling_minutes") {
      m.settling_minutes = parse_integer(value, line_no);
    } else if (key == "day_mode") {
      m.day_mode = parse_clock_span(parse_quoted(value, line_no));
    } else {
      line_error(line_no, "unknown key '" + key + "'");
    }
  }

  if (!saw_data) fail(ErrorCode::InvalidConfig, "manifest is missing 'data'");
  if (!saw_fans || m.fans.empty()) fail(ErrorCode::InvalidConfig, "manifest needs at least one fan");
  if (!saw_baseline || m.baseline_days.empty())
    fail(ErrorCode::InvalidConfig, "manifest needs at least one baseline day");
  if (!saw_event) fail(ErrorCode::InvalidConfig, "manifest is missing 'event_day'");
  if (!saw_windows || m.windows.empty())
    fail(ErrorCode::InvalidConfig, "manifest needs at least one window");
  if (m.settling_minutes < 0) fail(ErrorCode::InvalidConfig, "settling_minutes must be >= 0");

  for (std::size_t i = 0; i < m.fans.size(); ++i)
    for (std::size_t j = i + 1; j < m.fans.size(); ++j)
      if (m.fans[i] == m.fans[j])
        fail(ErrorCode::InvalidConfig, "duplicate fan id '" + m.fans[i] + "'");
  for (const std::string& day : m.baseline_days)
    if (!plausible_date(day))
      fail(ErrorCode::InvalidConfig, "baseline day '" + day + "' is not YYYY-MM-DD");
  if (!plausible_date(m.event_day))
    fail(ErrorCode::InvalidConfig, "event day '" + m.event_day + "' is not YYYY-MM-DD");
  for (std::size_t i = 1; i < m.baseline_days.size(); ++i)
    if (!(m.baseline_days[i - 1] < m.baseline_days[i]))
      fail(ErrorCode::InvalidConfig, "baseline days must be strictly increasing");
  for (const std::string& day : m.baseline_days)
    if (day == m.event_day)
      fail(ErrorCode::InvalidConfig, "event day '" + day + "' repeats a baseline day");
  for (std::size_t i = 0; i < m.windows.size(); ++i)
    for (std::size_t j = i + 1; j < m.windows.size(); ++j)
      if (m.windows[i].label == m.windows[j].label)
        fail(ErrorCode::InvalidConfig, "duplicate window label '" + m.windows[i].label + "'");
  return m;
}

std::string format_manifest(const Manifest& manifest) {
  const auto& clock = format_clock_minutes;
  auto list = [](const std::vector<std::string>& items) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) out << ", ";
      out << '"' << items[i] << '"';
    }
    out << ']';
    return out.str();
  };

  std::ostringstream out;
  out << "building = \"" << manifest.building << "\"\n";
  out << "data = \"" << manifest.data_path << "\"\n";
  out << "fans = " << list(manifest.fans) << "\n";
  out << "baseline_days = " << list(manifest.baseline_days) << "\n";
  out << "event_day = \"" << manifest.event_day << "\"\n";
  std::vector<std::string> windows;
  for (const WindowSpec& w : manifest.windows)
    windows.push_back(w.label + " " + clock(w.span.start_minute) + "-" + clock(w.span.end_minute));
  out << "windows = " << list(windows) << "\n";
  out << "settling_minutes = " << manifest.settling_minutes << "\n";
  out << "day_mode = \"" << clock(manifest.day_mode.start_minute) << "-"
      << clock(manifest.day_mode.end_minute) << "\"\n";
  return out.str();
}

}  // namespace fanbase
