#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sentigan/csv.hpp"
#include "sentigan/date.hpp"
#include "sentigan/errors.hpp"

namespace sentigan {

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::size_t kCloseColumn = 3;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{"open", "high", "low",
																			 "close", "adj_close", "volume"};

/// One trading day. A missing value is stored as NaN until repair_missing fills it.
struct Bar {
	Date date;
	double open = 0, high = 0, low = 0, close = 0, adj_close = 0, volume = 0;

	std::array<double, kFeatureCount> features() const { return {open, high, low, close, adj_close, volume}; }

	double &field(std::size_t k) {
		switch (k) {
		case 0: return open;
		case 1: return high;
		case 2: return low;
		case 3: return close;
		case 4: return adj_close;
		default: return volume;
		}
	}
	double field(std::size_t k) const { return const_cast<Bar *>(this)->field(k); }

	bool complete() const {
		const auto f = features();
		return std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
	}

	friend bool operator==(const Bar &a, const Bar &b) {
		if (a.date != b.date)
			return false;
		for (std::size_t k = 0; k < kFeatureCount; ++k) {
			const double x = a.field(k), y = b.field(k);
			if (!(x == y || (std::isnan(x) && std::isnan(y))))
				return false;
		}
		return true;
	}
};

struct Series {
	std::string symbol;
	std::vector<Bar> bars;

	std::vector<Date> dates() const {
		std::vector<Date> out;
		out.reserve(bars.size());
		for (const auto &b : bars)
			out.push_back(b.date);
		return out;
	}

	friend bool operator==(const Series &, const Series &) = default;
};

struct LoadReport {
	std::size_t rows = 0;
	std::size_t duplicates_removed = 0;
	std::size_t missing_cells = 0;
};

/// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
	if (std::isnan(v))
		return "";
	char buf[32];
	const auto res = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, res.ptr);
}

inline bool parse_number(std::string_view s, double &out) {
	while (!s.empty() && s.front() == ' ')
		s.remove_prefix(1);
	while (!s.empty() && s.back() == ' ')
		s.remove_suffix(1);
	if (s.empty() || s == "null" || s == "NaN" || s == "nan" || s == "NA") {
		out = std::numeric_limits<double>::quiet_NaN();
		return true;
	}
	if (s.front() == '+')
		s.remove_prefix(1);
	const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
	return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

/// Checks the OHLCV invariants on a bar whose fields are all present.
inline void validate_bar(const Bar &b) {
	const std::string when = format_date(b.date);
	auto fail = [&](std::string_view field, const std::string &why) {
		throw DataError("bar " + when + ": field '" + std::string(field) + "' " + why);
	};
	for (std::size_t k = 0; k < 5; ++k)
		if (!(b.field(k) > 0.0))
			fail(kFeatureNames[k], "must be a positive price");
	if (b.volume < 0.0)
		fail("volume", "must be non-negative");
	if (b.low > b.high)
		fail("high", "is below low");
	if (b.open < b.low || b.open > b.high)
		fail("open", "is outside [low, high]");
	if (b.close < b.low || b.close > b.high)
		fail("close", "is outside [low, high]");
}

/// Parses `date,open,high,low,close,adj_close,volume` CSV into a date-sorted
/// series. Repeated dates keep the first row. Empty or "null" cells are
/// kept as missing for repair_missing; complete rows are validated here.
inline Series load_ohlcv(std::istream &in, std::string symbol = {}, LoadReport *report = nullptr) {
	CsvReader reader(in);
	std::vector<std::string> fields;
	if (!reader.next(fields))
		throw DataError("OHLCV input is empty");
	static const std::vector<std::string> header{"date", "open", "high", "low", "close", "adj_close", "volume"};
	if (fields != header)
		throw DataError("OHLCV header must be 'date,open,high,low,close,adj_close,volume'");

	LoadReport rep;
	Series s;
	s.symbol = std::move(symbol);
	while (reader.next(fields)) {
		if (fields.size() == 1 && fields[0].empty())
			continue;
		const std::string where = "line " + std::to_string(reader.line());
		if (fields.size() != header.size())
			throw DataError(where + ": expected 7 fields, got " + std::to_string(fields.size()));
		Bar b;
		if (!try_parse_date(fields[0], b.date) || fields[0].size() != 10)
			throw DataError(where + ": bad date '" + fields[0] + "'");
		for (std::size_t k = 0; k < kFeatureCount; ++k) {
			if (!parse_number(fields[k + 1], b.field(k)))
				throw DataError(where + ": bad " + std::string(kFeatureNames[k]) + " value '" + fields[k + 1] + "'");
			if (std::isnan(b.field(k)))
				++rep.missing_cells;
		}
		if (b.complete())
			validate_bar(b);
		s.bars.push_back(b);
		++rep.rows;
	}
	std::stable_sort(s.bars.begin(), s.bars.end(), [](const Bar &a, const Bar &b) { return a.date < b.date; });
	const auto last = std::unique(s.bars.begin(), s.bars.end(), [](const Bar &a, const Bar &b) { return a.date == b.date; });
	rep.duplicates_removed = static_cast<std::size_t>(s.bars.end() - last);
	s.bars.erase(last, s.bars.end());
	if (report)
		*report = rep;
	return s;
}

inline void write_ohlcv(std::ostream &out, const Series &s) {
	out << "date,open,high,low,close,adj_close,volume\n";
	for (const auto &b : s.bars) {
		out << format_date(b.date);
		for (std::size_t k = 0; k < kFeatureCount; ++k)
			out << ',' << format_number(b.field(k));
		out << '\n';
	}
}

struct RepairEntry {
	Date date;
	std::string field;
	std::string action; // forward_fill, zero_fill, drop_leading_row, widen_range

	friend bool operator==(const RepairEntry &, const RepairEntry &) = default;
};

struct RepairResult {
	Series series;
	std::vector<RepairEntry> log;
};

/// Forward-fills missing prices from the previous trading day and missing
/// volume with 0. Rows before the first row with every price present are
/// dropped. A forward-filled open/close outside the day's range widens it.
inline RepairResult repair_missing(const Series &input) {
	for (std::size_t k = 0; k < kFeatureCount; ++k) {
		const bool any = std::any_of(input.bars.begin(), input.bars.end(),
									 [k](const Bar &b) { return std::isfinite(b.field(k)); });
		if (!input.bars.empty() && !any)
			throw DataError("field '" + std::string(kFeatureNames[k]) + "' has no values in " +
							(input.symbol.empty() ? std::string("series") : input.symbol));
	}
	RepairResult out;
	out.series.symbol = input.symbol;
	out.series.bars.reserve(input.bars.size());
	const Bar *prev = nullptr;
	for (const auto &orig : input.bars) {
		Bar b = orig;
		if (std::isnan(b.volume)) {
			b.volume = 0.0;
			out.log.push_back({b.date, "volume", "zero_fill"});
		}
		if (!prev) {
			bool has_all_prices = true;
			for (std::size_t k = 0; k < 5; ++k)
				has_all_prices = has_all_prices && std::isfinite(b.field(k));
			if (!has_all_prices) {
				for (std::size_t k = 0; k < 5; ++k)
					if (!std::isfinite(b.field(k)))
						out.log.push_back({b.date, std::string(kFeatureNames[k]), "drop_leading_row"});
				continue;
			}
		} else {
			bool filled = false;
			for (std::size_t k = 0; k < 5; ++k) {
				if (std::isnan(b.field(k))) {
					b.field(k) = prev->field(k);
					out.log.push_back({b.date, std::string(kFeatureNames[k]), "forward_fill"});
					filled = true;
				}
			}
			if (filled) {
				const double hi = std::max({b.high, b.open, b.close});
				const double lo = std::min({b.low, b.open, b.close});
				if (hi != b.high) {
					b.high = hi;
					out.log.push_back({b.date, "high", "widen_range"});
				}
				if (lo != b.low) {
					b.low = lo;
					out.log.push_back({b.date, "low", "widen_range"});
				}
			}
		}
		validate_bar(b);
		out.series.bars.push_back(b);
		prev = &out.series.bars.back();
	}
	return out;
}

inline void write_repair_log(std::ostream &out, const std::vector<RepairEntry> &log) {
	for (const auto &e : log)
		out << nlohmann::json{{"date", format_date(e.date)}, {"field", e.field}, {"action", e.action}}.dump() << '\n';
}

} // namespace sentigan
