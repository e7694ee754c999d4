#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sentigan/pipeline/pipeline.hpp"

namespace {

using namespace sentigan;

constexpr int kExitData = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

struct Options {
	std::string config;
	std::optional<std::uint64_t> seed;
	std::vector<std::string> assets;
	std::string model = "all";
	std::string from_metrics;
};

std::vector<ModelKind> parse_models(const std::string &name) {
	if (name == "all")
		return {kAllModels.begin(), kAllModels.end()};
	return {model_kind_from_string(name)};
}

RunConfig load(const Options &o) {
	if (o.config.empty())
		throw UsageError("--config is required");
	RunConfig c = load_config(o.config);
	if (o.seed)
		c.seed = o.seed;
	return c;
}

std::mutex warn_mutex;

void warn(const std::string &msg) {
	std::lock_guard lock(warn_mutex);
	std::cerr << "warning: " << msg << '\n';
}

int dispatch(const std::string &command, const Options &o) {
	if (command == "evaluate" && !o.from_metrics.empty()) {
		std::ifstream in(o.from_metrics);
		if (!in)
			throw DataError("cannot open metrics file " + o.from_metrics);
		const auto result = evaluate_from_metrics(in);
		write_aggregate_csv(std::cout, result.aggregate);
		std::cout << '\n' << result.summary;
		return 0;
	}
	if (!o.from_metrics.empty())
		throw UsageError("--from-metrics only applies to evaluate");

	const auto models = parse_models(o.model);
	const RunConfig c = load(o);
	if (command == "ingest") {
		cmd_ingest(c, o.assets, warn);
	} else if (command == "sentiment") {
		cmd_sentiment(c, o.assets, warn);
	} else if (command == "train") {
		cmd_train(c, o.assets, models);
	} else if (command == "evaluate") {
		std::cout << cmd_evaluate(c, o.assets, models).summary;
	} else if (command == "plot") {
		cmd_plot(c, o.assets, models);
	} else if (command == "run") {
		std::cout << cmd_run(c, o.assets, models, warn).summary;
	}
	return 0;
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Sentiment-conditioned price forecasting pipeline"};
	app.require_subcommand(1, 1);
	Options o;
	const auto add_common = [&](CLI::App *sub) {
		sub->add_option("--config", o.config, "JSON config file");
		sub->add_option("--seed", o.seed, "Override the config seed");
		sub->add_option("--asset", o.assets, "Restrict to these symbols (repeatable)");
		sub->add_option("--model", o.model, "arima, lstm, gan or all");
	};
	for (const char *name : {"ingest", "sentiment", "train", "evaluate", "plot", "run"}) {
		auto *sub = app.add_subcommand(name);
		add_common(sub);
		if (std::string(name) == "evaluate")
			sub->add_option("--from-metrics", o.from_metrics, "Aggregate a metrics CSV (asset,model,rmse) instead");
	}
	app.get_subcommand("ingest")->description("Load, repair and align prices with daily sentiment");
	app.get_subcommand("sentiment")->description("Score posts and write daily sentiment");
	app.get_subcommand("train")->description("Fit models on each asset's train partition");
	app.get_subcommand("evaluate")->description("Forecast the test partitions and aggregate");
	app.get_subcommand("plot")->description("Render predicted vs actual SVG and CSV");
	app.get_subcommand("run")->description("ingest, train, evaluate and plot");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		return app.exit(e);
	} catch (const CLI::CallForAllHelp &e) {
		return app.exit(e);
	} catch (const CLI::ParseError &e) {
		app.exit(e);
		return kExitUsage;
	}

	try {
		return dispatch(app.get_subcommands().front()->get_name(), o);
	} catch (const UsageError &e) {
		std::cerr << "usage error: " << e.what() << '\n';
		return kExitUsage;
	} catch (const DataError &e) {
		std::cerr << "data error: " << e.what() << '\n';
		return kExitData;
	} catch (const FetchError &e) {
		std::cerr << "fetch error: " << e.what() << '\n';
		return kExitData;
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitInternal;
	}
}
