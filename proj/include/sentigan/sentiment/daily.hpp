#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "sentigan/csv.hpp"
#include "sentigan/date.hpp"
#include "sentigan/sentiment/vader.hpp"

namespace sentigan::sentiment {

struct SentimentRecord {
	Date day;          // calendar day of the timestamp
	std::string timestamp;
	std::string raw_text;
	double compound = 0.0;
};

struct DailySentiment {
	Date date;
	double compound = 0.0;
	std::size_t sample_count = 0;

	friend bool operator==(const DailySentiment &, const DailySentiment &) = default;
};

struct AggregationDiagnostics {
	std::size_t assigned = 0;
	std::size_t rolled_forward = 0; // posted on a non-trading day
	std::size_t after_last_day = 0; // no later trading day to roll into; dropped
};

/// One entry per trading day. Same-day compounds are averaged; posts on
/// non-trading days count toward the next trading day; empty days are 0.
inline std::vector<DailySentiment> aggregate_daily(const std::vector<SentimentRecord> &records,
												   const std::vector<Date> &trading_days,
												   AggregationDiagnostics *diagnostics = nullptr) {
	std::vector<DailySentiment> out;
	out.reserve(trading_days.size());
	for (Date d : trading_days)
		out.push_back({d, 0.0, 0});
	std::vector<double> sums(trading_days.size(), 0.0);
	AggregationDiagnostics diag;
	for (const auto &r : records) {
		const auto it = std::lower_bound(trading_days.begin(), trading_days.end(), r.day);
		if (it == trading_days.end()) {
			++diag.after_last_day;
			continue;
		}
		if (*it != r.day)
			++diag.rolled_forward;
		const auto k = static_cast<std::size_t>(it - trading_days.begin());
		sums[k] += r.compound;
		++out[k].sample_count;
		++diag.assigned;
	}
	for (std::size_t k = 0; k < out.size(); ++k)
		if (out[k].sample_count > 0)
			out[k].compound = sums[k] / static_cast<double>(out[k].sample_count);
	if (diagnostics)
		*diagnostics = diag;
	return out;
}

/// Reads `timestamp,text` CSV and scores every post.
inline std::vector<SentimentRecord> load_posts(std::istream &in, const Lexicon &lexicon) {
	CsvReader reader(in);
	std::vector<std::string> fields;
	if (!reader.next(fields))
		throw DataError("post file is empty");
	if (fields.size() < 2 || fields[0] != "timestamp" || fields[1] != "text")
		throw DataError("post file header must be 'timestamp,text'");
	std::vector<SentimentRecord> records;
	VaderScorer scorer(lexicon);
	while (reader.next(fields)) {
		if (fields.size() == 1 && fields[0].empty())
			continue;
		if (fields.size() != 2)
			throw DataError("post file line " + std::to_string(reader.line()) + ": expected 2 fields, got " +
							std::to_string(fields.size()));
		SentimentRecord r;
		if (!try_parse_date(fields[0], r.day))
			throw DataError("post file line " + std::to_string(reader.line()) + ": bad timestamp '" + fields[0] + "'");
		r.timestamp = fields[0];
		r.raw_text = fields[1];
		r.compound = scorer.compound(strip_noise(r.raw_text));
		records.push_back(std::move(r));
	}
	return records;
}

} // namespace sentigan::sentiment
