#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "sentigan/csv.hpp"
#include "sentigan/eval/report.hpp"

namespace sentigan {

struct RmseCell {
	std::string symbol;
	ModelKind model = ModelKind::arima;
	double rmse = 0.0;
};

struct AggregateRow {
	ModelKind model = ModelKind::arima;
	double mean_rmse = 0.0;
	double median_rmse = 0.0;
	std::size_t wins = 0;

	friend bool operator==(const AggregateRow &, const AggregateRow &) = default;
};

/// An asset whose minimum RMSE is shared; every listed model got the win.
struct WinTie {
	std::string symbol;
	std::vector<ModelKind> models;
};

struct AggregateReport {
	std::vector<AggregateRow> rows; // canonical model order
	std::vector<WinTie> ties;
	std::size_t assets = 0;
};

inline double median(std::vector<double> v) {
	if (v.empty())
		throw DataError("median of an empty set");
	std::sort(v.begin(), v.end());
	const std::size_t n = v.size();
	return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Mean/median RMSE and wins per model. Every asset must have exactly one
/// cell for every model that appears anywhere in the input.
inline AggregateReport aggregate(const std::vector<RmseCell> &cells) {
	if (cells.empty())
		throw DataError("aggregate: no reports");
	std::set<ModelKind> models;
	std::vector<std::string> symbols; // first-seen order
	std::map<std::pair<std::string, ModelKind>, double> grid;
	for (const auto &c : cells) {
		models.insert(c.model);
		if (std::find(symbols.begin(), symbols.end(), c.symbol) == symbols.end())
			symbols.push_back(c.symbol);
		if (!std::isfinite(c.rmse) || c.rmse < 0.0)
			throw DataError("aggregate: RMSE for " + c.symbol + "/" + std::string(to_string(c.model)) +
							" is not a finite non-negative number");
		if (!grid.emplace(std::pair{c.symbol, c.model}, c.rmse).second)
			throw DataError("aggregate: duplicate report for " + c.symbol + "/" + std::string(to_string(c.model)));
	}
	for (const auto &s : symbols)
		for (ModelKind m : models)
			if (!grid.count({s, m}))
				throw DataError("aggregate: missing report for asset " + s + ", model " + std::string(to_string(m)));

	AggregateReport out;
	out.assets = symbols.size();
	std::map<ModelKind, std::size_t> wins;
	for (const auto &s : symbols) {
		double best = std::numeric_limits<double>::infinity();
		for (ModelKind m : models)
			best = std::min(best, grid.at({s, m}));
		WinTie tie{s, {}};
		for (ModelKind m : models)
			if (grid.at({s, m}) == best)
				tie.models.push_back(m);
		for (ModelKind m : tie.models)
			++wins[m];
		if (tie.models.size() > 1)
			out.ties.push_back(std::move(tie));
	}
	for (ModelKind m : models) {
		std::vector<double> v;
		for (const auto &s : symbols)
			v.push_back(grid.at({s, m}));
		AggregateRow row;
		row.model = m;
		row.mean_rmse = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
		row.median_rmse = median(v);
		row.wins = wins[m];
		out.rows.push_back(row);
	}
	return out;
}

inline AggregateReport aggregate(const std::vector<ForecastReport> &reports) {
	std::vector<RmseCell> cells;
	for (const auto &r : reports)
		cells.push_back({r.symbol, r.model, r.metrics.rmse});
	return aggregate(cells);
}

/// Columns: model,mean_rmse,median_rmse,wins
inline void write_aggregate_csv(std::ostream &out, const AggregateReport &agg) {
	out << "model,mean_rmse,median_rmse,wins\n";
	for (const auto &r : agg.rows)
		out << to_string(r.model) << ',' << format_number(r.mean_rmse) << ',' << format_number(r.median_rmse) << ','
			<< r.wins << '\n';
}

/// Reads per-cell metrics with at least `asset` (or `symbol`), `model` and
/// `rmse` columns; any other columns are ignored. Model names are case-insensitive.
inline std::vector<RmseCell> read_metrics_csv(std::istream &in) {
	CsvReader reader(in);
	std::vector<std::string> header;
	if (!reader.next(header))
		throw DataError("metrics file is empty");
	const auto column = [&](std::initializer_list<const char *> names) -> std::size_t {
		for (std::size_t i = 0; i < header.size(); ++i)
			for (const char *n : names)
				if (header[i] == n)
					return i;
		throw DataError("metrics file header lacks a '" + std::string(*names.begin()) + "' column");
	};
	const std::size_t asset_col = column({"asset", "symbol"});
	const std::size_t model_col = column({"model"});
	const std::size_t rmse_col = column({"rmse"});
	std::vector<RmseCell> cells;
	std::vector<std::string> fields;
	while (reader.next(fields)) {
		if (fields.size() == 1 && fields[0].empty())
			continue;
		const std::string where = "metrics line " + std::to_string(reader.line());
		if (fields.size() != header.size())
			throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
							std::to_string(fields.size()));
		std::string model = fields[model_col];
		std::transform(model.begin(), model.end(), model.begin(), [](unsigned char c) { return std::tolower(c); });
		RmseCell c;
		c.symbol = fields[asset_col];
		try {
			c.model = model_kind_from_string(model);
		} catch (const UsageError &) {
			throw DataError(where + ": unknown model '" + fields[model_col] + "'");
		}
		if (!parse_number(fields[rmse_col], c.rmse) || std::isnan(c.rmse))
			throw DataError(where + ": bad rmse '" + fields[rmse_col] + "'");
		cells.push_back(std::move(c));
	}
	return cells;
}

namespace detail {

inline std::string fixed2(double v) {
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.2f", v);
	return buf;
}

inline std::string pad(std::string s, std::size_t width) {
	if (s.size() < width)
		s.append(width - s.size(), ' ');
	return s;
}

} // namespace detail

/// Plain-text per-asset grid followed by the aggregate table.
inline void write_summary(std::ostream &out, const std::vector<ForecastReport> &reports, const AggregateReport &agg) {
	using detail::fixed2;
	using detail::pad;
	if (!reports.empty()) {
		out << pad("asset", 12) << pad("model", 8) << pad("MAE", 12) << pad("RMSE", 12) << pad("MSE", 14) << "MAPE\n";
		for (const auto &r : reports)
			out << pad(r.symbol, 12) << pad(std::string(to_string(r.model)), 8) << pad(fixed2(r.metrics.mae), 12)
				<< pad(fixed2(r.metrics.rmse), 12) << pad(fixed2(r.metrics.mse), 14)
				<< (r.metrics.mape ? fixed2(*r.metrics.mape) : std::string("-")) << '\n';
		out << '\n';
	}
	out << pad("model", 8) << pad("mean RMSE", 12) << pad("median RMSE", 14) << "wins\n";
	for (const auto &r : agg.rows)
		out << pad(std::string(to_string(r.model)), 8) << pad(fixed2(r.mean_rmse), 12)
			<< pad(fixed2(r.median_rmse), 14) << r.wins << '\n';
	for (const auto &t : agg.ties) {
		out << "tie on " << t.symbol << ':';
		for (ModelKind m : t.models)
			out << ' ' << to_string(m);
		out << '\n';
	}
}

} // namespace sentigan
