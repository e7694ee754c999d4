#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sentigan/data/series.hpp"
#include "sentigan/numkernel/matrix.hpp"
#include "sentigan/sentiment/daily.hpp"

namespace sentigan {

/// Market features and daily sentiment joined on trading dates.
struct AlignedDataset {
	std::string symbol;
	std::vector<Date> dates;
	Matrix features; // T x 6: open, high, low, close, adj_close, volume
	Vector sentiment;
	std::vector<std::size_t> sentiment_count;

	std::size_t size() const { return dates.size(); }
	Vector close() const { return features.column(kCloseColumn); }

	friend bool operator==(const AlignedDataset &, const AlignedDataset &) = default;
};

struct AlignDiagnostics {
	std::size_t matched = 0;
	std::size_t outside_range = 0; // sentiment dated on no bar
};

/// One sentiment value per bar date; days without an entry get 0.
inline AlignedDataset align(const Series &series, const std::vector<sentiment::DailySentiment> &daily,
							AlignDiagnostics *diagnostics = nullptr) {
	AlignedDataset ds;
	ds.symbol = series.symbol;
	ds.features = Matrix(series.bars.size(), kFeatureCount);
	ds.sentiment.assign(series.bars.size(), 0.0);
	ds.sentiment_count.assign(series.bars.size(), 0);
	for (std::size_t i = 0; i < series.bars.size(); ++i) {
		const Bar &b = series.bars[i];
		if (!b.complete())
			throw DataError("align: bar " + format_date(b.date) + " has missing fields; run repair_missing first");
		if (i > 0 && !(series.bars[i - 1].date < b.date))
			throw DataError("align: series dates are not strictly increasing at " + format_date(b.date));
		ds.dates.push_back(b.date);
		const auto f = b.features();
		std::copy(f.begin(), f.end(), ds.features.row(i).begin());
	}
	AlignDiagnostics diag;
	for (const auto &d : daily) {
		const auto it = std::lower_bound(ds.dates.begin(), ds.dates.end(), d.date);
		if (it == ds.dates.end() || *it != d.date) {
			++diag.outside_range;
			continue;
		}
		const auto k = static_cast<std::size_t>(it - ds.dates.begin());
		ds.sentiment[k] = d.compound;
		ds.sentiment_count[k] = d.sample_count;
		++diag.matched;
	}
	if (diagnostics)
		*diagnostics = diag;
	return ds;
}

inline void write_dataset(std::ostream &out, const AlignedDataset &ds) {
	out << "date,open,high,low,close,adj_close,volume,sentiment,sentiment_count\n";
	for (std::size_t i = 0; i < ds.size(); ++i) {
		out << format_date(ds.dates[i]);
		for (std::size_t k = 0; k < kFeatureCount; ++k)
			out << ',' << format_number(ds.features(i, k));
		out << ',' << format_number(ds.sentiment[i]) << ',' << ds.sentiment_count[i] << '\n';
	}
}

inline AlignedDataset read_dataset(std::istream &in, std::string symbol) {
	CsvReader reader(in);
	std::vector<std::string> fields;
	if (!reader.next(fields) || fields.size() != 9 || fields[0] != "date" || fields[7] != "sentiment")
		throw DataError("dataset header must be 'date,open,high,low,close,adj_close,volume,sentiment,sentiment_count'");
	AlignedDataset ds;
	ds.symbol = std::move(symbol);
	ds.features = Matrix(0, kFeatureCount);
	while (reader.next(fields)) {
		if (fields.size() == 1 && fields[0].empty())
			continue;
		const std::string where = "dataset line " + std::to_string(reader.line());
		if (fields.size() != 9)
			throw DataError(where + ": expected 9 fields");
		ds.dates.push_back(parse_date(fields[0]));
		double row[kFeatureCount];
		for (std::size_t k = 0; k < kFeatureCount; ++k)
			if (!parse_number(fields[k + 1], row[k]) || std::isnan(row[k]))
				throw DataError(where + ": bad " + std::string(kFeatureNames[k]));
		ds.features.append_row(row);
		double s = 0.0;
		if (!parse_number(fields[7], s) || std::isnan(s))
			throw DataError(where + ": bad sentiment");
		ds.sentiment.push_back(s);
		ds.sentiment_count.push_back(static_cast<std::size_t>(std::stoull(fields[8])));
	}
	return ds;
}

/// (X_t, s_t, x_{t+1}) with X_t the L rows ending at day t.
struct WindowSample {
	Matrix history; // L x 6
	double sentiment = 0.0;
	Vector target; // 6
	Date end_date;    // day t, the last row of history
	Date target_date; // day t+1
	std::size_t target_index = 0; // row of the target in the source dataset
};

enum class WindowSentiment {
	last_day,    // s_t
	window_mean, // mean over the L history days
};

inline std::vector<WindowSample> make_windows(const AlignedDataset &ds, std::size_t length,
											  WindowSentiment mode = WindowSentiment::last_day) {
	if (length == 0)
		throw UsageError("window length must be positive");
	if (ds.size() < length + 1)
		throw DataError("make_windows: need at least L+1 = " + std::to_string(length + 1) + " rows, have " +
						std::to_string(ds.size()));
	std::vector<WindowSample> out;
	out.reserve(ds.size() - length);
	for (std::size_t i = 0; i + length < ds.size(); ++i) {
		WindowSample w;
		w.history = ds.features.slice_rows(i, i + length);
		const std::size_t t = i + length - 1;
		if (mode == WindowSentiment::last_day) {
			w.sentiment = ds.sentiment[t];
		} else {
			double s = 0.0;
			for (std::size_t k = i; k <= t; ++k)
				s += ds.sentiment[k];
			w.sentiment = s / static_cast<double>(length);
		}
		const auto target = ds.features.row(t + 1);
		w.target.assign(target.begin(), target.end());
		w.end_date = ds.dates[t];
		w.target_date = ds.dates[t + 1];
		w.target_index = t + 1;
		out.push_back(std::move(w));
	}
	return out;
}

enum class SplitPolicy { fraction_90_10, fraction_70_30, holdout_last_20 };

inline std::string_view to_string(SplitPolicy p) {
	switch (p) {
	case SplitPolicy::fraction_90_10: return "fraction_90_10";
	case SplitPolicy::fraction_70_30: return "fraction_70_30";
	case SplitPolicy::holdout_last_20: return "holdout_last_20";
	}
	return "fraction_90_10";
}

inline SplitPolicy split_policy_from_string(std::string_view s) {
	if (s == "fraction_90_10") return SplitPolicy::fraction_90_10;
	if (s == "fraction_70_30") return SplitPolicy::fraction_70_30;
	if (s == "holdout_last_20") return SplitPolicy::holdout_last_20;
	throw UsageError("unknown split policy '" + std::string(s) + "'");
}

inline constexpr std::size_t kHoldoutLength = 20;

/// Index of the first test item for n chronologically ordered items.
inline std::size_t split_boundary(std::size_t n, SplitPolicy policy) {
	std::size_t boundary = 0;
	switch (policy) {
	case SplitPolicy::fraction_90_10: boundary = n * 9 / 10; break;
	case SplitPolicy::fraction_70_30: boundary = n * 7 / 10; break;
	case SplitPolicy::holdout_last_20: boundary = n >= kHoldoutLength ? n - kHoldoutLength : 0; break;
	}
	if (boundary == 0 || boundary >= n)
		throw DataError("split " + std::string(to_string(policy)) + " of " + std::to_string(n) +
						" items leaves an empty partition");
	return boundary;
}

template <class T>
struct Partition {
	std::vector<T> train;
	std::vector<T> test;
	std::size_t boundary = 0;
};

/// Chronological split, no shuffling: items [0, boundary) train, the rest test.
template <class T>
Partition<T> split(const std::vector<T> &items, SplitPolicy policy) {
	Partition<T> p;
	p.boundary = split_boundary(items.size(), policy);
	p.train.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(p.boundary));
	p.test.assign(items.begin() + static_cast<std::ptrdiff_t>(p.boundary), items.end());
	return p;
}

inline bool strictly_increasing(const std::vector<Date> &dates) {
	for (std::size_t i = 1; i < dates.size(); ++i)
		if (!(dates[i - 1] < dates[i]))
			return false;
	return true;
}

} // namespace sentigan
