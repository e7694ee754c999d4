#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sentigan/data/dataset.hpp"
#include "sentigan/date.hpp"
#include "sentigan/eval/metrics.hpp"

namespace sentigan {

/// One held-out prediction. `input_end_date` is the last day whose data
/// entered the forecast, kept for the causality audit.
struct ForecastRow {
	Date date;
	double predicted = 0.0;
	double actual = 0.0;
	Date input_end_date;

	friend bool operator==(const ForecastRow &, const ForecastRow &) = default;
};

enum class ModelKind { arima, lstm, gan };

inline constexpr std::array<ModelKind, 3> kAllModels{ModelKind::arima, ModelKind::lstm, ModelKind::gan};

inline std::string_view to_string(ModelKind m) {
	switch (m) {
	case ModelKind::arima: return "arima";
	case ModelKind::lstm: return "lstm";
	case ModelKind::gan: return "gan";
	}
	return "arima";
}

inline ModelKind model_kind_from_string(std::string_view s) {
	for (ModelKind m : kAllModels)
		if (s == to_string(m))
			return m;
	throw UsageError("unknown model '" + std::string(s) + "' (expected arima, lstm or gan)");
}

/// The split each model is evaluated under unless configured otherwise.
inline SplitPolicy default_split(ModelKind m) {
	switch (m) {
	case ModelKind::arima: return SplitPolicy::fraction_90_10;
	case ModelKind::lstm: return SplitPolicy::fraction_70_30;
	case ModelKind::gan: return SplitPolicy::holdout_last_20;
	}
	return SplitPolicy::fraction_90_10;
}

struct ForecastReport {
	std::string symbol;
	ModelKind model = ModelKind::arima;
	SplitPolicy split = SplitPolicy::fraction_90_10;
	std::vector<ForecastRow> rows;
	Metrics metrics;

	friend bool operator==(const ForecastReport &, const ForecastReport &) = default;
};

/// Builds a report from held-out rows; rows must be in strictly increasing
/// date order and each prediction must precede its target.
inline ForecastReport make_report(std::string symbol, ModelKind model, SplitPolicy split, std::vector<ForecastRow> rows) {
	for (std::size_t i = 0; i < rows.size(); ++i) {
		if (i > 0 && !(rows[i - 1].date < rows[i].date))
			throw DataError("report " + symbol + "/" + std::string(to_string(model)) +
							": rows are not in chronological order at " + format_date(rows[i].date));
		if (!(rows[i].input_end_date < rows[i].date))
			throw DataError("report " + symbol + "/" + std::string(to_string(model)) + ": prediction for " +
							format_date(rows[i].date) + " uses data through " + format_date(rows[i].input_end_date));
	}
	std::vector<double> predicted, actual;
	for (const auto &r : rows) {
		predicted.push_back(r.predicted);
		actual.push_back(r.actual);
	}
	ForecastReport rep{std::move(symbol), model, split, std::move(rows), {}};
	rep.metrics = compute_metrics(predicted, actual);
	return rep;
}

inline nlohmann::json metrics_to_json(const Metrics &m) {
	nlohmann::json j{{"count", m.count}, {"mae", m.mae}, {"mse", m.mse}, {"rmse", m.rmse}};
	j["mape"] = m.mape ? nlohmann::json(*m.mape) : nlohmann::json(nullptr);
	j["mape_omitted"] = m.mape_omitted();
	return j;
}

inline Metrics metrics_from_json(const nlohmann::json &j) {
	Metrics m;
	m.count = j.at("count").get<std::size_t>();
	m.mae = j.at("mae").get<double>();
	m.mse = j.at("mse").get<double>();
	m.rmse = j.at("rmse").get<double>();
	if (!j.at("mape").is_null())
		m.mape = j.at("mape").get<double>();
	return m;
}

inline nlohmann::json report_to_json(const ForecastReport &r) {
	nlohmann::json rows = nlohmann::json::array();
	for (const auto &row : r.rows)
		rows.push_back({{"date", format_date(row.date)},
						{"predicted", row.predicted},
						{"actual", row.actual},
						{"input_end_date", format_date(row.input_end_date)}});
	return {{"symbol", r.symbol},
			{"model", to_string(r.model)},
			{"split", to_string(r.split)},
			{"metrics", metrics_to_json(r.metrics)},
			{"rows", rows}};
}

inline ForecastReport report_from_json(const nlohmann::json &j) {
	ForecastReport r;
	r.symbol = j.at("symbol").get<std::string>();
	r.model = model_kind_from_string(j.at("model").get<std::string>());
	r.split = split_policy_from_string(j.at("split").get<std::string>());
	for (const auto &row : j.at("rows"))
		r.rows.push_back({parse_date(row.at("date").get<std::string>()), row.at("predicted").get<double>(),
						  row.at("actual").get<double>(), parse_date(row.at("input_end_date").get<std::string>())});
	r.metrics = metrics_from_json(j.at("metrics"));
	return r;
}

struct CausalityViolation {
	std::string symbol;
	ModelKind model = ModelKind::arima;
	Date date;
	std::string reason;
};

/// Checks that every prediction used data dated strictly before its target.
/// With the source dataset it also checks that the input ended exactly on
/// the previous trading day and that `actual` is that day's recorded close.
inline std::vector<CausalityViolation> audit_causality(const ForecastReport &r, const AlignedDataset *ds = nullptr) {
	std::vector<CausalityViolation> out;
	const auto flag = [&](Date d, std::string why) { out.push_back({r.symbol, r.model, d, std::move(why)}); };
	for (std::size_t i = 0; i < r.rows.size(); ++i) {
		const ForecastRow &row = r.rows[i];
		if (!(row.input_end_date < row.date))
			flag(row.date, "input ends " + format_date(row.input_end_date) + ", not before the target");
		if (i > 0 && !(r.rows[i - 1].date < row.date))
			flag(row.date, "rows out of chronological order");
		if (!ds)
			continue;
		const auto it = std::lower_bound(ds->dates.begin(), ds->dates.end(), row.date);
		if (it == ds->dates.end() || *it != row.date) {
			flag(row.date, "target date is not a trading day of the dataset");
			continue;
		}
		const auto k = static_cast<std::size_t>(it - ds->dates.begin());
		if (k == 0 || ds->dates[k - 1] != row.input_end_date)
			flag(row.date, "input does not end on the previous trading day");
		if (ds->features(k, kCloseColumn) != row.actual)
			flag(row.date, "actual differs from the recorded close");
	}
	return out;
}

} // namespace sentigan
