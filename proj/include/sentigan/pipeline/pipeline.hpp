#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sentigan/data/dataset.hpp"
#include "sentigan/data/series.hpp"
#include "sentigan/eval/aggregate.hpp"
#include "sentigan/eval/evaluate.hpp"
#include "sentigan/pipeline/config.hpp"
#include "sentigan/pipeline/plot.hpp"
#include "sentigan/sentiment/daily.hpp"
#include "sentigan/sentiment/lexicon.hpp"

namespace sentigan {

/// Output layout under the configured output directory.
struct OutputPaths {
	fs::path root;

	fs::path dataset(const std::string &s) const { return root / "datasets" / (s + ".csv"); }
	fs::path repair_log(const std::string &s) const { return root / "datasets" / (s + ".repairs.jsonl"); }
	fs::path daily_sentiment(const std::string &s) const { return root / "sentiment" / (s + ".csv"); }
	fs::path artifact(const std::string &s, ModelKind m) const {
		return root / "models" / s / (std::string(to_string(m)) + ".json");
	}
	fs::path train_log(const std::string &s, ModelKind m) const {
		return root / "logs" / s / (std::string(to_string(m)) + ".csv");
	}
	fs::path report(const std::string &s, ModelKind m) const {
		return root / "reports" / s / (std::string(to_string(m)) + ".json");
	}
	fs::path plot_svg(const std::string &s, ModelKind m) const {
		return root / "plots" / (s + "_" + std::string(to_string(m)) + ".svg");
	}
	fs::path plot_csv(const std::string &s, ModelKind m) const {
		return root / "plots" / (s + "_" + std::string(to_string(m)) + ".csv");
	}
	fs::path aggregate_csv() const { return root / "aggregate.csv"; }
	fs::path summary() const { return root / "summary.txt"; }
};

/// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const fs::path &path, const std::string &content) {
	if (path.has_parent_path())
		fs::create_directories(path.parent_path());
	fs::path tmp = path;
	tmp += ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out)
			throw std::runtime_error("cannot write " + tmp.string());
		out << content;
		if (!out.flush())
			throw std::runtime_error("write failed for " + tmp.string());
	}
	fs::rename(tmp, path);
}

inline std::string read_file(const fs::path &path, const std::string &what) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw DataError("missing " + what + ": " + path.string());
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

/// Stable per-(seed, asset, model) seed: FNV-1a over the names, mixed with splitmix64.
inline std::uint64_t derive_seed(std::uint64_t seed, const std::string &symbol, ModelKind model) {
	std::uint64_t h = 0xcbf29ce484222325ULL;
	const auto feed = [&](std::string_view s) {
		for (unsigned char c : s) {
			h ^= c;
			h *= 0x100000001b3ULL;
		}
		h ^= 0xff;
		h *= 0x100000001b3ULL;
	};
	feed(symbol);
	feed(to_string(model));
	std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (h | 1);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

inline std::size_t effective_workers(std::size_t configured, std::size_t tasks) {
	std::size_t w = configured ? configured : std::max(1u, std::thread::hardware_concurrency());
	return std::max<std::size_t>(1, std::min(w, tasks));
}

/// Runs task(i) for i in [0, n) on at most `workers` threads. Every task
/// runs; the failure with the lowest index is rethrown.
template <class Task>
void parallel_for(std::size_t n, std::size_t workers, Task &&task) {
	std::vector<std::exception_ptr> errors(n);
	std::atomic<std::size_t> next{0};
	const auto worker = [&] {
		for (std::size_t i = next++; i < n; i = next++) {
			try {
				task(i);
			} catch (...) {
				errors[i] = std::current_exception();
			}
		}
	};
	const std::size_t w = effective_workers(workers, n);
	if (w == 1) {
		worker();
	} else {
		std::vector<std::thread> threads;
		for (std::size_t k = 0; k < w; ++k)
			threads.emplace_back(worker);
		for (auto &t : threads)
			t.join();
	}
	for (auto &e : errors)
		if (e)
			std::rethrow_exception(e);
}

/// Rethrows library errors with a context prefix, keeping their type.
template <class F>
auto with_context(const std::string &context, F &&f) -> decltype(f()) {
	try {
		return f();
	} catch (const TrainingError &e) {
		std::string msg = e.what();
		const std::string suffix = " (at " + std::to_string(e.index()) + ")";
		if (msg.size() >= suffix.size() && msg.compare(msg.size() - suffix.size(), suffix.size(), suffix) == 0)
			msg.resize(msg.size() - suffix.size());
		throw TrainingError(context + ": " + msg, e.index());
	} catch (const DimensionError &e) {
		throw DataError(context + ": " + e.what());
	} catch (const DataError &e) {
		throw DataError(context + ": " + e.what());
	} catch (const UsageError &e) {
		throw UsageError(context + ": " + e.what());
	} catch (const StateError &e) {
		throw StateError(context + ": " + e.what());
	}
}

using WarningSink = std::function<void(const std::string &)>;

/// Restricts the configured assets to `only` (all when empty).
inline std::vector<AssetConfig> select_assets(const RunConfig &c, const std::vector<std::string> &only) {
	if (only.empty())
		return c.assets;
	std::vector<AssetConfig> out;
	for (const auto &a : c.assets)
		if (std::find(only.begin(), only.end(), a.symbol) != only.end())
			out.push_back(a);
	for (const auto &s : only)
		c.asset(s); // throws UsageError on unknown symbols
	return out;
}

struct IngestedAsset {
	AlignedDataset dataset;
	std::vector<sentiment::DailySentiment> daily;
	std::vector<RepairEntry> repairs;
};

inline IngestedAsset ingest_asset(const AssetConfig &a, const sentiment::Lexicon &lexicon, const WarningSink &warn) {
	return with_context("asset " + a.symbol, [&] {
		std::ifstream prices(a.prices);
		if (!prices)
			throw DataError("cannot open price file " + a.prices.string());
		LoadReport load;
		Series raw = load_ohlcv(prices, a.symbol, &load);
		if (load.duplicates_removed)
			warn(a.symbol + ": dropped " + std::to_string(load.duplicates_removed) + " duplicate date rows");
		RepairResult repaired = repair_missing(raw);
		if (!repaired.log.empty())
			warn(a.symbol + ": repaired " + std::to_string(repaired.log.size()) + " missing values");

		std::vector<Date> days;
		for (const auto &b : repaired.series.bars)
			days.push_back(b.date);
		std::vector<sentiment::DailySentiment> daily;
		if (a.posts && fs::is_regular_file(*a.posts)) {
			std::ifstream posts(*a.posts);
			const auto records = sentiment::load_posts(posts, lexicon);
			sentiment::AggregationDiagnostics diag;
			daily = sentiment::aggregate_daily(records, days, &diag);
			if (diag.after_last_day)
				warn(a.symbol + ": " + std::to_string(diag.after_last_day) +
					 " posts dated after the last trading day were dropped");
		} else {
			warn(a.symbol + ": no post file" + (a.posts ? " at " + a.posts->string() : std::string()) +
				 "; sentiment set to 0");
			daily = sentiment::aggregate_daily({}, days);
		}
		IngestedAsset out;
		out.dataset = align(repaired.series, daily);
		out.daily = std::move(daily);
		out.repairs = std::move(repaired.log);
		return out;
	});
}

inline std::string daily_sentiment_csv(const std::vector<sentiment::DailySentiment> &daily) {
	std::ostringstream out;
	out << "date,compound,count\n";
	for (const auto &d : daily)
		out << format_date(d.date) << ',' << format_number(d.compound) << ',' << d.sample_count << '\n';
	return out.str();
}

inline sentiment::Lexicon load_lexicon_file(const fs::path &p) {
	std::ifstream in(p);
	if (!in)
		throw DataError("cannot open lexicon " + p.string());
	return sentiment::load_lexicon(in);
}

/// Scores posts and writes per-asset daily sentiment files.
inline void cmd_sentiment(const RunConfig &c, const std::vector<std::string> &only, const WarningSink &warn) {
	validate_config(c);
	const auto lexicon = load_lexicon_file(c.lexicon);
	const OutputPaths out{c.output_dir};
	const auto assets = select_assets(c, only);
	parallel_for(assets.size(), c.workers, [&](std::size_t i) {
		const auto ingested = ingest_asset(assets[i], lexicon, warn);
		write_file_atomic(out.daily_sentiment(assets[i].symbol), daily_sentiment_csv(ingested.daily));
	});
}

/// Loads, repairs and aligns every asset; writes datasets, sentiment and repair logs.
inline void cmd_ingest(const RunConfig &c, const std::vector<std::string> &only, const WarningSink &warn) {
	validate_config(c);
	const auto lexicon = load_lexicon_file(c.lexicon);
	const OutputPaths out{c.output_dir};
	const auto assets = select_assets(c, only);
	parallel_for(assets.size(), c.workers, [&](std::size_t i) {
		const auto &a = assets[i];
		const auto ingested = ingest_asset(a, lexicon, warn);
		std::ostringstream ds, log;
		write_dataset(ds, ingested.dataset);
		write_repair_log(log, ingested.repairs);
		write_file_atomic(out.dataset(a.symbol), ds.str());
		write_file_atomic(out.repair_log(a.symbol), log.str());
		write_file_atomic(out.daily_sentiment(a.symbol), daily_sentiment_csv(ingested.daily));
	});
}

inline AlignedDataset load_ingested(const OutputPaths &out, const std::string &symbol) {
	std::istringstream in(read_file(out.dataset(symbol), "dataset for asset " + symbol + " (run ingest first)"));
	return read_dataset(in, symbol);
}

struct TrainedModel {
	ModelArtifact artifact;
	std::string log_csv;
};

inline std::string arima_log_csv(const OrderSelection &sel, const ArimaModel &m) {
	std::ostringstream out;
	out << "kind,d,p,q,statistic_or_css,aic,ok\n";
	for (std::size_t d = 0; d < sel.adf.size(); ++d)
		out << "adf," << d << ",,," << format_number(sel.adf[d].statistic) << ",,"
			<< (sel.adf[d].is_stationary ? 1 : 0) << '\n';
	for (const auto &cand : sel.grid)
		out << "grid," << sel.order.d << ',' << cand.p << ',' << cand.q << ',' << format_number(cand.css) << ','
			<< format_number(cand.aic) << ',' << (cand.ok ? 1 : 0) << '\n';
	out << "fit," << m.order.d << ',' << m.order.p << ',' << m.order.q << ',' << format_number(m.css) << ','
		<< format_number(arima_aic(m.css, m.observations, m.order.p, m.order.q)) << ",1\n";
	return out.str();
}

inline TrainedModel train_model(const RunConfig &c, const AlignedDataset &ds, ModelKind model) {
	const SplitPolicy policy = c.splits.at(model);
	const auto part = split(make_windows(ds, c.window), policy);
	const PartitionStamp stamp = stamp_partition(part, policy);
	const std::uint64_t seed = derive_seed(*c.seed, ds.symbol, model);
	std::ostringstream log;
	switch (model) {
	case ModelKind::arima: {
		const Vector train = arima_train_series(ds, part);
		const OrderSelection sel = select_order(train, c.arima.p_max, c.arima.q_max);
		ArimaModel m = fit_arima(train, sel.order);
		return {ArimaArtifact{m, stamp}, arima_log_csv(sel, m)};
	}
	case ModelKind::lstm: {
		auto r = train_lstm(part.train, c.lstm, seed, c.lstm_hidden);
		write_lstm_log(log, r.log);
		return {LstmArtifact{std::move(r.model), stamp}, log.str()};
	}
	case ModelKind::gan: {
		auto r = train_gan(part.train, c.window, c.gan, seed, c.gan_arch);
		write_gan_log(log, r.log);
		return {GanArtifact{std::move(r.generator), std::move(r.discriminator), stamp}, log.str()};
	}
	}
	throw UsageError("unknown model");
}

/// Trains the selected models for the selected assets; one task per (asset, model).
inline void cmd_train(const RunConfig &c, const std::vector<std::string> &only, const std::vector<ModelKind> &models) {
	validate_config(c);
	const OutputPaths out{c.output_dir};
	const auto assets = select_assets(c, only);
	std::vector<AlignedDataset> datasets;
	for (const auto &a : assets)
		datasets.push_back(load_ingested(out, a.symbol));
	parallel_for(assets.size() * models.size(), c.workers, [&](std::size_t i) {
		const auto &ds = datasets[i / models.size()];
		const ModelKind m = models[i % models.size()];
		const TrainedModel t =
			with_context(ds.symbol + "/" + std::string(to_string(m)), [&] { return train_model(c, ds, m); });
		write_file_atomic(out.artifact(ds.symbol, m), artifact_to_json(t.artifact).dump(1, '\t') + "\n");
		write_file_atomic(out.train_log(ds.symbol, m), t.log_csv);
	});
}

inline ModelArtifact load_artifact(const OutputPaths &out, const std::string &symbol, ModelKind m) {
	const fs::path p = out.artifact(symbol, m);
	if (!fs::is_regular_file(p))
		throw DataError("missing artifact for asset " + symbol + ", model " + std::string(to_string(m)) + " (" +
						p.string() + ")");
	try {
		return artifact_from_json(nlohmann::json::parse(read_file(p, "artifact")));
	} catch (const nlohmann::json::exception &e) {
		throw DataError("artifact " + p.string() + " is malformed: " + e.what());
	}
}

struct EvaluationOutput {
	std::vector<ForecastReport> reports; // asset-major, model order as requested
	AggregateReport aggregate;
	std::string summary;
};

/// Evaluates every (asset, model) cell, audits causality across all
/// reports and writes reports, aggregate.csv and summary.txt.
inline EvaluationOutput cmd_evaluate(const RunConfig &c, const std::vector<std::string> &only,
									 const std::vector<ModelKind> &models) {
	validate_config(c);
	const OutputPaths out{c.output_dir};
	const auto assets = select_assets(c, only);
	std::vector<AlignedDataset> datasets;
	for (const auto &a : assets)
		datasets.push_back(load_ingested(out, a.symbol));
	std::vector<ModelArtifact> artifacts;
	for (const auto &a : assets)
		for (ModelKind m : models)
			artifacts.push_back(load_artifact(out, a.symbol, m));

	RollingOptions rolling;
	rolling.refit_each_step = c.arima.refit_each_step;
	EvaluationOutput result;
	result.reports.resize(artifacts.size());
	parallel_for(artifacts.size(), c.workers, [&](std::size_t i) {
		const auto &ds = datasets[i / models.size()];
		result.reports[i] = with_context(ds.symbol + "/" + std::string(to_string(models[i % models.size()])),
										 [&] { return evaluate(artifacts[i], ds, rolling); });
	});

	std::size_t violations = 0;
	std::string first_violation;
	for (std::size_t i = 0; i < result.reports.size(); ++i) {
		for (const auto &v : audit_causality(result.reports[i], &datasets[i / models.size()])) {
			if (!violations++)
				first_violation = v.symbol + "/" + std::string(to_string(v.model)) + " " + format_date(v.date) + ": " +
								  v.reason;
		}
	}
	if (violations)
		throw StateError("causality audit failed on " + std::to_string(violations) + " rows; first: " +
						 first_violation);

	result.aggregate = aggregate(result.reports);
	std::ostringstream agg, summary;
	write_aggregate_csv(agg, result.aggregate);
	write_summary(summary, result.reports, result.aggregate);
	summary << "causality audit: " << result.reports.size() << " reports, 0 violations\n";
	result.summary = summary.str();
	for (const auto &r : result.reports)
		write_file_atomic(out.report(r.symbol, r.model), report_to_json(r).dump(1, '\t') + "\n");
	write_file_atomic(out.aggregate_csv(), agg.str());
	write_file_atomic(out.summary(), result.summary);
	return result;
}

/// Aggregate-only evaluation from a metrics table (no models involved).
inline EvaluationOutput evaluate_from_metrics(std::istream &metrics) {
	EvaluationOutput result;
	result.aggregate = aggregate(read_metrics_csv(metrics));
	std::ostringstream summary;
	write_summary(summary, {}, result.aggregate);
	result.summary = summary.str();
	return result;
}

inline ForecastReport load_report(const OutputPaths &out, const std::string &symbol, ModelKind m) {
	const fs::path p = out.report(symbol, m);
	if (!fs::is_regular_file(p))
		throw DataError("missing report for asset " + symbol + ", model " + std::string(to_string(m)) +
						" (run evaluate first)");
	try {
		return report_from_json(nlohmann::json::parse(read_file(p, "report")));
	} catch (const nlohmann::json::exception &e) {
		throw DataError("report " + p.string() + " is malformed: " + e.what());
	}
}

inline void cmd_plot(const RunConfig &c, const std::vector<std::string> &only, const std::vector<ModelKind> &models) {
	const OutputPaths out{c.output_dir};
	for (const auto &a : select_assets(c, only)) {
		for (ModelKind m : models) {
			const ForecastReport r = load_report(out, a.symbol, m);
			write_file_atomic(out.plot_svg(a.symbol, m), render_plot_svg(r));
			write_file_atomic(out.plot_csv(a.symbol, m), render_plot_csv(r));
		}
	}
}

inline EvaluationOutput cmd_run(const RunConfig &c, const std::vector<std::string> &only,
								const std::vector<ModelKind> &models, const WarningSink &warn) {
	cmd_ingest(c, only, warn);
	cmd_train(c, only, models);
	auto result = cmd_evaluate(c, only, models);
	cmd_plot(c, only, models);
	return result;
}

} // namespace sentigan
