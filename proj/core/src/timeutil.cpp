#include "runclust/timeutil.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "runclust/error.hpp"

namespace runclust {
namespace {

int read_digits(std::string_view text, std::size_t& pos, std::size_t count) {
  if (pos + count > text.size()) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data() + pos, text.data() + pos + count, value);
  if (ec != std::errc() || ptr != text.data() + pos + count) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
  pos += count;
  return value;
}

void expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
  ++pos;
}

}  // namespace

double parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  std::size_t pos = 0;
  const int y = read_digits(text, pos, 4);
  expect(text, pos, '-');
  const int mo = read_digits(text, pos, 2);
  expect(text, pos, '-');
  const int d = read_digits(text, pos, 2);
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
  ++pos;
  const int hh = read_digits(text, pos, 2);
  expect(text, pos, ':');
  const int mm = read_digits(text, pos, 2);
  int ss = 0;
  double frac = 0.0;
  if (pos < text.size() && text[pos] == ':') {
    ++pos;
    ss = read_digits(text, pos, 2);
    if (pos < text.size() && text[pos] == '.') {
      const std::size_t start = pos;
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
      if (pos == start + 1) {
        throw DataError("malformed timestamp '" + std::string(text) + "'");
      }
      std::from_chars(text.data() + start, text.data() + pos, frac);
    }
  }
  const std::string_view rest = text.substr(pos);
  if (!(rest.empty() || rest == "Z" || rest == "+00:00")) {
    throw DataError("timestamp '" + std::string(text) + "' is not UTC");
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    throw DataError("invalid date/time in timestamp '" + std::string(text) +
                    "'");
  }
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + hh * 3600.0 + mm * 60.0 + ss +
         frac;
}

std::string format_iso8601(double epoch_seconds) {
  using namespace std::chrono;
  const double whole = std::floor(epoch_seconds);
  const auto secs = static_cast<std::int64_t>(whole);
  const std::int64_t day_count =
      secs >= 0 ? secs / 86400 : -((-secs + 86399) / 86400);
  const std::int64_t in_day = secs - day_count * 86400;
  const year_month_day ymd{sys_days{days{day_count}}};
  char buf[64];
  const double frac = epoch_seconds - whole;
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d",
                        static_cast<int>(ymd.year()),
                        static_cast<unsigned>(ymd.month()),
                        static_cast<unsigned>(ymd.day()),
                        static_cast<int>(in_day / 3600),
                        static_cast<int>((in_day / 60) % 60),
                        static_cast<int>(in_day % 60));
  std::string out(buf, static_cast<std::size_t>(n));
  if (frac != 0.0) {
    char fbuf[16];
    std::snprintf(fbuf, sizeof fbuf, "%.6f", frac);
    // "0.xxxxxx" -> ".xxxxxx"; rounding up to 1.0 is clamped.
    std::string_view f(fbuf);
    out += (f[0] == '1') ? std::string(".999999") : std::string(f.substr(1));
  }
  out += 'Z';
  return out;
}

}  // namespace runclust
