#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sentigan/arima/arima.hpp"
#include "sentigan/data/dataset.hpp"
#include "sentigan/eval/report.hpp"
#include "sentigan/gan/gan.hpp"
#include "sentigan/lstm/lstm.hpp"

namespace sentigan {

/// Identifies the train/test partition a model was fitted on, so that
/// evaluation can refuse a different one.
struct PartitionStamp {
	SplitPolicy policy = SplitPolicy::fraction_90_10;
	std::size_t window = 0;
	std::size_t windows = 0;
	std::size_t boundary = 0;
	Date last_train_target;
	Date first_test_target;

	friend bool operator==(const PartitionStamp &, const PartitionStamp &) = default;
};

/// Target dates must rise strictly through train and on into test.
inline void check_chronological(const Partition<WindowSample> &p) {
	const WindowSample *prev = nullptr;
	for (const auto *part : {&p.train, &p.test}) {
		for (const auto &w : *part) {
			if (!(w.end_date < w.target_date))
				throw DataError("partition window ending " + format_date(w.end_date) + " targets an earlier day");
			if (prev && !(prev->target_date < w.target_date))
				throw DataError("partition is not chronological: " + format_date(w.target_date) + " follows " +
								format_date(prev->target_date));
			prev = &w;
		}
	}
}

inline PartitionStamp stamp_partition(const Partition<WindowSample> &p, SplitPolicy policy) {
	check_chronological(p);
	if (p.train.empty() || p.test.empty())
		throw DataError("partition has an empty side");
	return {policy,
			p.train.front().history.rows(),
			p.train.size() + p.test.size(),
			p.train.size(),
			p.train.back().target_date,
			p.test.front().target_date};
}

inline void check_partition(const PartitionStamp &trained, const PartitionStamp &evaluated) {
	if (trained == evaluated)
		return;
	throw DataError("partition mismatch: model trained on " + std::string(to_string(trained.policy)) + " L=" +
					std::to_string(trained.window) + " with " + std::to_string(trained.boundary) + "/" +
					std::to_string(trained.windows) + " train windows (test from " +
					format_date(trained.first_test_target) + "), evaluated on " +
					std::string(to_string(evaluated.policy)) + " L=" + std::to_string(evaluated.window) + " with " +
					std::to_string(evaluated.boundary) + "/" + std::to_string(evaluated.windows) +
					" (test from " + format_date(evaluated.first_test_target) + ")");
}

struct ArimaArtifact {
	ArimaModel model;
	PartitionStamp partition;
};

struct LstmArtifact {
	LstmModel model;
	PartitionStamp partition;
};

struct GanArtifact {
	Generator generator;
	Discriminator discriminator;
	PartitionStamp partition;
};

using ModelArtifact = std::variant<ArimaArtifact, LstmArtifact, GanArtifact>;

inline ModelKind artifact_kind(const ModelArtifact &a) {
	return static_cast<ModelKind>(a.index());
}

inline const PartitionStamp &artifact_partition(const ModelArtifact &a) {
	return std::visit([](const auto &x) -> const PartitionStamp & { return x.partition; }, a);
}

/// Close series up to (not including) the first test target.
inline Vector arima_train_series(const AlignedDataset &ds, const Partition<WindowSample> &p) {
	const Vector close = ds.close();
	return Vector(close.begin(), close.begin() + static_cast<std::ptrdiff_t>(p.test.front().target_index));
}

/// One-step predictions over the test partition, following each model's
/// protocol: ARIMA rolls forward on realized closes, the LSTM predicts each
/// test window, the generator runs teacher-forced over the holdout.
inline ForecastReport evaluate(const ModelArtifact &artifact, const AlignedDataset &ds,
							   const Partition<WindowSample> &partition, SplitPolicy policy,
							   const RollingOptions &arima_options = {}) {
	check_partition(artifact_partition(artifact), stamp_partition(partition, policy));
	std::vector<ForecastRow> rows;
	if (const auto *a = std::get_if<ArimaArtifact>(&artifact)) {
		const Vector train = arima_train_series(ds, partition);
		Vector test;
		for (const auto &w : partition.test)
			test.push_back(w.target[kCloseColumn]);
		const Vector pred = rolling_forecast(a->model, train, test, arima_options);
		for (std::size_t i = 0; i < pred.size(); ++i)
			rows.push_back({partition.test[i].target_date, pred[i], test[i], partition.test[i].end_date});
	} else if (const auto *l = std::get_if<LstmArtifact>(&artifact)) {
		for (const auto &w : partition.test)
			rows.push_back({w.target_date, lstm_predict(l->model, w), w.target[kCloseColumn], w.end_date});
	} else {
		const auto &g = std::get<GanArtifact>(artifact);
		if (partition.test.back().target_index + 1 != ds.size())
			throw DataError("GAN holdout must end on the last dataset row");
		HoldoutOptions opt;
		opt.holdout = partition.test.size();
		rows = forecast_holdout(g.generator, ds, opt);
	}
	return make_report(ds.symbol, artifact_kind(artifact), policy, std::move(rows));
}

inline ForecastReport evaluate(const ModelArtifact &artifact, const AlignedDataset &ds,
							   const RollingOptions &arima_options = {}) {
	const PartitionStamp &stamp = artifact_partition(artifact);
	return evaluate(artifact, ds, split(make_windows(ds, stamp.window), stamp.policy), stamp.policy, arima_options);
}

inline nlohmann::json stamp_to_json(const PartitionStamp &s) {
	return {{"policy", to_string(s.policy)},
			{"window", s.window},
			{"windows", s.windows},
			{"boundary", s.boundary},
			{"last_train_target", format_date(s.last_train_target)},
			{"first_test_target", format_date(s.first_test_target)}};
}

inline PartitionStamp stamp_from_json(const nlohmann::json &j) {
	return {split_policy_from_string(j.at("policy").get<std::string>()),
			j.at("window").get<std::size_t>(),
			j.at("windows").get<std::size_t>(),
			j.at("boundary").get<std::size_t>(),
			parse_date(j.at("last_train_target").get<std::string>()),
			parse_date(j.at("first_test_target").get<std::string>())};
}

inline nlohmann::json artifact_to_json(const ModelArtifact &a) {
	nlohmann::json j{{"model", to_string(artifact_kind(a))}, {"partition", stamp_to_json(artifact_partition(a))}};
	if (const auto *x = std::get_if<ArimaArtifact>(&a)) {
		j["arima"] = arima_to_json(x->model);
	} else if (const auto *x = std::get_if<LstmArtifact>(&a)) {
		j["lstm"] = lstm_to_json(x->model);
	} else {
		const auto &g = std::get<GanArtifact>(a);
		j["generator"] = generator_to_json(g.generator);
		j["discriminator"] = discriminator_to_json(g.discriminator);
	}
	return j;
}

inline ModelArtifact artifact_from_json(const nlohmann::json &j) {
	const PartitionStamp stamp = stamp_from_json(j.at("partition"));
	switch (model_kind_from_string(j.at("model").get<std::string>())) {
	case ModelKind::arima: return ArimaArtifact{arima_from_json(j.at("arima")), stamp};
	case ModelKind::lstm: return LstmArtifact{lstm_from_json(j.at("lstm")), stamp};
	case ModelKind::gan:
		return GanArtifact{generator_from_json(j.at("generator")), discriminator_from_json(j.at("discriminator")), stamp};
	}
	throw DataError("unreachable model kind");
}

} // namespace sentigan
