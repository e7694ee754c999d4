#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "sentigan/errors.hpp"

namespace sentigan {

using Date = std::chrono::sys_days;

/// Parses the calendar-day prefix of an ISO-8601 date or timestamp
/// ("2024-03-01", "2024-03-01T14:30:00Z", "2024-03-01 09:00"). Any time and
/// offset part is ignored: the day is taken as written.
inline bool try_parse_date(std::string_view s, Date &out) {
	if (s.size() < 10 || s[4] != '-' || s[7] != '-')
		return false;
	if (s.size() > 10 && s[10] != 'T' && s[10] != ' ')
		return false;
	int y = 0;
	unsigned m = 0, d = 0;
	for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
		if (s[i] < '0' || s[i] > '9')
			return false;
	y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
	m = static_cast<unsigned>((s[5] - '0') * 10 + (s[6] - '0'));
	d = static_cast<unsigned>((s[8] - '0') * 10 + (s[9] - '0'));
	const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
	if (!ymd.ok())
		return false;
	out = Date(ymd);
	return true;
}

inline Date parse_date(std::string_view s) {
	Date d;
	if (!try_parse_date(s, d))
		throw DataError("invalid ISO-8601 date '" + std::string(s) + "'");
	return d;
}

inline std::string format_date(Date d) {
	const std::chrono::year_month_day ymd{d};
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
				  static_cast<unsigned>(ymd.day()));
	return buf;
}

inline bool is_weekend(Date d) {
	const std::chrono::weekday wd{d};
	return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

} // namespace sentigan
