// Copyright 2026 The splitgauntlet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLITGAUNTLET_CALENDAR_HPP
#define SPLITGAUNTLET_CALENDAR_HPP

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace splitgauntlet {

/// A calendar date at day granularity (UTC), stored as days since 1970-01-01.
/// Comparisons and day arithmetic work directly on the underlying count.
struct CivilDay {
  std::int64_t days_since_epoch = 0;

  friend bool operator==(CivilDay a, CivilDay b) { return a.days_since_epoch == b.days_since_epoch; }
  friend bool operator!=(CivilDay a, CivilDay b) { return !(a == b); }
  friend bool operator<(CivilDay a, CivilDay b) { return a.days_since_epoch < b.days_since_epoch; }
  friend bool operator<=(CivilDay a, CivilDay b) { return a.days_since_epoch <= b.days_since_epoch; }
  friend bool operator>(CivilDay a, CivilDay b) { return b < a; }
  friend bool operator>=(CivilDay a, CivilDay b) { return b <= a; }

  CivilDay plus_days(std::int64_t n) const { return CivilDay{days_since_epoch + n}; }
  std::int64_t minus(CivilDay other) const { return days_since_epoch - other.days_since_epoch; }
};

namespace detail {

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
  static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap_year(y)) return 29;
  return kDays[m - 1];
}

// Civil-from-days and days-from-civil conversions (proleptic Gregorian).
inline std::int64_t days_from_ymd(int y, int m, int d) {
  const int yy = y - (m <= 2);
  const std::int64_t era = (yy >= 0 ? yy : yy - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(yy - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void ymd_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace detail

/// Parses a strict ISO-8601 calendar date ("YYYY-MM-DD"). Throws
/// std::invalid_argument on any malformed or non-existent date.
inline CivilDay parse_civil_day(std::string_view s) {
  auto fail = [&] { throw std::invalid_argument("invalid ISO-8601 date: '" + std::string(s) + "'"); };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
  auto digits = [&](int from, int to) {
    int v = 0;
    for (int i = from; i < to; ++i) {
      if (s[i] < '0' || s[i] > '9') fail();
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  const int y = digits(0, 4);
  const int m = digits(5, 7);
  const int d = digits(8, 10);
  if (m < 1 || m > 12) fail();
  if (d < 1 || d > detail::days_in_month(y, m)) fail();
  return CivilDay{detail::days_from_ymd(y, m, d)};
}

inline std::string format_civil_day(CivilDay day) {
  int y, m, d;
  detail::ymd_from_days(day.days_since_epoch, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_CALENDAR_HPP
