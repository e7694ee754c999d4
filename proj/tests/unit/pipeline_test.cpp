#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "sentigan/pipeline/pipeline.hpp"

using namespace sentigan;

namespace {

const fs::path kData = fs::path(SENTIGAN_REPO_ROOT) / "data";
const fs::path kFixture = kData / "fixture";
const fs::path kLexicon = kData / "vader_lexicon.txt";

fs::path scratch(const std::string &name) {
	const fs::path p = fs::temp_directory_path() / ("sentigan_pipeline_" + name + "_" + std::to_string(getpid()));
	fs::remove_all(p);
	fs::create_directories(p);
	return p;
}

std::string slurp(const fs::path &p) {
	std::ifstream in(p, std::ios::binary);
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void spit(const fs::path &p, const std::string &s) {
	std::ofstream out(p, std::ios::binary);
	out << s;
}

// Two fixture assets, one of them without posts, and very short schedules.
std::string small_config(const fs::path &out, const std::string &extra_lstm = "") {
	std::ostringstream c;
	c << "{\n"
	  << "  // test config\n"
	  << "  \"seed\": 11,\n"
	  << "  \"workers\": 2,\n"
	  << "  \"lexicon\": \"" << kLexicon.string() << "\",\n"
	  << "  \"output_dir\": \"" << out.string() << "\",\n"
	  << "  \"window\": 5,\n"
	  << "  \"assets\": [\n"
	  << "    {\"symbol\": \"ALFA\", \"prices\": \"" << (kFixture / "ALFA_prices.csv").string() << "\", \"posts\": \""
	  << (kFixture / "ALFA_posts.csv").string() << "\"},\n"
	  << "    {\"symbol\": \"GOLF\", \"prices\": \"" << (kFixture / "GOLF_prices.csv").string() << "\"}\n"
	  << "  ],\n"
	  << "  \"arima\": {\"p_max\": 1, \"q_max\": 1},\n"
	  << "  \"lstm\": {\"hidden\": 4, \"max_epochs\": 2" << extra_lstm << "},\n"
	  << "  \"gan\": {\"epochs\": 1, \"generator_hidden\": [8], \"discriminator_hidden\": [8]}\n"
	  << "}\n";
	return c.str();
}

RunConfig small_run_config(const fs::path &out) {
	return parse_config(small_config(out), fs::current_path());
}

const std::vector<ModelKind> kAll(kAllModels.begin(), kAllModels.end());

void ignore_warning(const std::string &) {}

int run_cli(const std::string &args, std::string *output = nullptr) {
	const fs::path log = fs::temp_directory_path() / ("sentigan_cli_output_" + std::to_string(getpid()) + ".txt");
	const std::string cmd = std::string(SENTIGAN_CLI) + " " + args + " > " + log.string() + " 2>&1";
	const int status = std::system(cmd.c_str());
	if (output)
		*output = slurp(log);
	return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, FixtureConfigResolvesPathsAndKeepsDefaults) {
	const RunConfig c = load_config(kFixture / "config.json");
	ASSERT_EQ(c.assets.size(), 7u);
	EXPECT_EQ(c.assets[0].symbol, "ALFA");
	EXPECT_EQ(c.assets[0].prices, (kFixture / "ALFA_prices.csv").lexically_normal());
	EXPECT_FALSE(c.assets[6].posts.has_value());
	EXPECT_EQ(c.lexicon, kLexicon.lexically_normal());
	EXPECT_EQ(c.output_dir, (kFixture / "out").lexically_normal());
	EXPECT_EQ(c.window, 20u);
	EXPECT_EQ(c.splits.at(ModelKind::arima), SplitPolicy::fraction_90_10);
	EXPECT_EQ(c.splits.at(ModelKind::lstm), SplitPolicy::fraction_70_30);
	EXPECT_EQ(c.splits.at(ModelKind::gan), SplitPolicy::holdout_last_20);
	EXPECT_DOUBLE_EQ(c.gan.learning_rate, 0.0002);
	EXPECT_EQ(c.gan.batch_size, 5u);
	EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, ParsesOverrides) {
	const RunConfig c = parse_config(R"({"lexicon": "lex.txt", "seed": 3, "window": 7, "workers": 2,
		"assets": [{"symbol": "X", "prices": "x.csv"}],
		"splits": {"gan": "fraction_70_30"},
		"arima": {"p_max": 2, "refit_each_step": true},
		"lstm": {"hidden": 16, "learning_rate": 0.01},
		"gan": {"epochs": 9, "noise_dim": 3, "generator_hidden": [10], "generator_average": 0.5}})",
									 "/base");
	EXPECT_EQ(*c.seed, 3u);
	EXPECT_EQ(c.window, 7u);
	EXPECT_EQ(c.workers, 2u);
	EXPECT_EQ(c.lexicon, fs::path("/base/lex.txt"));
	EXPECT_EQ(c.assets[0].prices, fs::path("/base/x.csv"));
	EXPECT_EQ(c.splits.at(ModelKind::gan), SplitPolicy::fraction_70_30);
	EXPECT_EQ(c.splits.at(ModelKind::lstm), SplitPolicy::fraction_70_30);
	EXPECT_EQ(c.arima.p_max, 2u);
	EXPECT_EQ(c.arima.q_max, 3u);
	EXPECT_TRUE(c.arima.refit_each_step);
	EXPECT_EQ(c.lstm_hidden, 16u);
	EXPECT_DOUBLE_EQ(c.lstm.learning_rate, 0.01);
	EXPECT_EQ(c.gan.epochs, 9u);
	EXPECT_EQ(c.gan_arch.noise_dim, 3u);
	EXPECT_EQ(c.gan_arch.generator_hidden, std::vector<std::size_t>{10});
	EXPECT_DOUBLE_EQ(c.gan.generator_average, 0.5);
}

TEST(Config, RejectsBadInput) {
	const std::string asset = R"("assets": [{"symbol": "X", "prices": "x.csv"}])";
	EXPECT_THROW(parse_config("{not json", "."), UsageError);
	EXPECT_THROW(parse_config("{" + asset + "}", "."), UsageError); // no lexicon
	EXPECT_THROW(parse_config(R"({"lexicon": "l", "assets": []})", "."), UsageError);
	EXPECT_THROW(parse_config(R"({"lexicon": "l", "colour": 1, )" + asset + "}", "."), UsageError);
	EXPECT_THROW(parse_config(R"({"lexicon": "l", "gan": {"lr": 1}, )" + asset + "}", "."), UsageError);
	EXPECT_THROW(parse_config(R"({"lexicon": "l", "window": "ten", )" + asset + "}", "."), UsageError);
	EXPECT_THROW(parse_config(R"({"lexicon": "l", "splits": {"gan": "random"}, )" + asset + "}", "."), UsageError);
	EXPECT_THROW(parse_config(R"({"lexicon": "l", "gan": {"batch_size": 0}, )" + asset + "}", "."), UsageError);
	EXPECT_THROW(parse_config(R"({"lexicon": "l", "assets": [{"symbol": "a/b", "prices": "p"}]})", "."), UsageError);
	EXPECT_THROW(parse_config(R"({"lexicon": "l", "assets": [{"symbol": "A", "prices": "p"}, {"symbol": "A", "prices": "q"}]})", "."),
				 UsageError);
}

TEST(Config, ValidationRequiresSeedAndExistingInputs) {
	RunConfig c = load_config(kFixture / "config.json");
	c.seed.reset();
	EXPECT_THROW(validate_config(c), UsageError);
	c.seed = 1;
	c.assets[0].prices = kFixture / "nope.csv";
	EXPECT_THROW(validate_config(c), DataError);
	c = load_config(kFixture / "config.json");
	c.lexicon = kFixture / "nope.txt";
	EXPECT_THROW(validate_config(c), DataError);
	c = load_config(kFixture / "config.json");
	c.assets[0].posts = kFixture / "nope_posts.csv";
	EXPECT_NO_THROW(validate_config(c));
}

namespace {

ForecastReport sample_report(std::size_t n) {
	std::vector<ForecastRow> rows;
	Date d(std::chrono::year{2023} / 3 / 1);
	for (std::size_t i = 0; i < n; ++i) {
		const Date next = d + std::chrono::days(1);
		rows.push_back({next, 100.0 + 0.1 * static_cast<double>(i) + 1.0 / 3.0, 100.0 + std::sin(static_cast<double>(i)), d});
		d = next;
	}
	return make_report("ZZ", ModelKind::gan, SplitPolicy::holdout_last_20, rows);
}

std::size_t count(const std::string &s, const std::string &needle) {
	std::size_t n = 0;
	for (auto at = s.find(needle); at != std::string::npos; at = s.find(needle, at + 1))
		++n;
	return n;
}

} // namespace

TEST(Plot, CsvRoundTripsExactly) {
	const ForecastReport r = sample_report(20);
	std::istringstream in(render_plot_csv(r));
	const auto points = read_plot_csv(in);
	ASSERT_EQ(points.size(), 20u);
	for (std::size_t i = 0; i < 20; ++i) {
		EXPECT_EQ(points[i].date, r.rows[i].date);
		EXPECT_EQ(points[i].actual, r.rows[i].actual);
		EXPECT_EQ(points[i].predicted, r.rows[i].predicted);
	}
}

TEST(Plot, SvgHasTwoPolylinesOfTwentyPoints) {
	const std::string svg = render_plot_svg(sample_report(20));
	EXPECT_EQ(count(svg, "<polyline"), 2u);
	const std::regex points_attr("points=\"([^\"]*)\"");
	std::size_t lines = 0;
	for (std::sregex_iterator it(svg.begin(), svg.end(), points_attr), end; it != end; ++it, ++lines) {
		const std::string pts = (*it)[1];
		EXPECT_EQ(count(pts, ","), 20u);
	}
	EXPECT_EQ(lines, 2u);
	EXPECT_NE(svg.find("class=\"actual\""), std::string::npos);
	EXPECT_NE(svg.find("class=\"predicted\""), std::string::npos);
}

TEST(Plot, DeterministicBytes) {
	EXPECT_EQ(render_plot_svg(sample_report(20)), render_plot_svg(sample_report(20)));
	EXPECT_EQ(render_plot_csv(sample_report(20)), render_plot_csv(sample_report(20)));
}

TEST(Plot, EmptyReportAndBadCsv) {
	ForecastReport r = sample_report(1);
	r.rows.clear();
	EXPECT_THROW(render_plot_svg(r), DataError);
	std::istringstream bad("date,actual,predicted\n2023-01-01,1,x\n");
	EXPECT_THROW(read_plot_csv(bad), DataError);
}

TEST(Pipeline, DeriveSeedIsStableAndDistinct) {
	std::set<std::uint64_t> seen;
	for (const char *sym : {"ALFA", "BRAV", "CHAR"})
		for (ModelKind m : kAllModels)
			seen.insert(derive_seed(42, sym, m));
	EXPECT_EQ(seen.size(), 9u);
	EXPECT_EQ(derive_seed(42, "ALFA", ModelKind::gan), derive_seed(42, "ALFA", ModelKind::gan));
	EXPECT_NE(derive_seed(42, "ALFA", ModelKind::gan), derive_seed(43, "ALFA", ModelKind::gan));
	// concatenation must not collide
	EXPECT_NE(derive_seed(1, "AB", ModelKind::arima), derive_seed(1, "A", ModelKind::arima));
}

TEST(Pipeline, ParallelForRunsEveryTaskAndRethrowsLowestFailure) {
	for (std::size_t workers : {1u, 3u}) {
		std::vector<int> hits(10, 0);
		try {
			parallel_for(10, workers, [&](std::size_t i) {
				hits[i] = 1;
				if (i == 7)
					throw DataError("seven");
				if (i == 4)
					throw UsageError("four");
			});
			FAIL() << "expected a throw";
		} catch (const UsageError &e) {
			EXPECT_STREQ(e.what(), "four");
		}
		EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 10);
	}
}

TEST(Pipeline, WithContextKeepsTypeAndIndex) {
	try {
		with_context("ALFA/gan", []() -> int { throw TrainingError("loss is not finite", 12); });
		FAIL();
	} catch (const TrainingError &e) {
		EXPECT_EQ(e.index(), 12u);
		EXPECT_STREQ(e.what(), "ALFA/gan: loss is not finite (at 12)");
	}
	EXPECT_THROW(with_context("x", []() -> int { throw UsageError("u"); }), UsageError);
	EXPECT_THROW(with_context("x", []() -> int { throw DataError("d"); }), DataError);
	EXPECT_EQ(with_context("x", [] { return 5; }), 5);
}

TEST(Pipeline, AtomicWriteLeavesNoTemporary) {
	const fs::path dir = scratch("atomic");
	write_file_atomic(dir / "a" / "b.txt", "one");
	write_file_atomic(dir / "a" / "b.txt", "two");
	EXPECT_EQ(slurp(dir / "a" / "b.txt"), "two");
	EXPECT_FALSE(fs::exists(dir / "a" / "b.txt.tmp"));
}

TEST(Pipeline, IngestFillsMissingPostsWithZerosAndWarns) {
	const fs::path out = scratch("ingest");
	const RunConfig c = small_run_config(out);
	std::vector<std::string> warnings;
	std::mutex m;
	cmd_ingest(c, {}, [&](const std::string &w) {
		std::lock_guard lock(m);
		warnings.push_back(w);
	});
	const OutputPaths paths{out};
	const AlignedDataset golf = load_ingested(paths, "GOLF");
	EXPECT_EQ(golf.size(), 260u);
	EXPECT_TRUE(std::all_of(golf.sentiment.begin(), golf.sentiment.end(), [](double s) { return s == 0.0; }));
	EXPECT_TRUE(std::any_of(warnings.begin(), warnings.end(),
							[](const std::string &w) { return w.find("GOLF: no post file") == 0; }));
	const AlignedDataset alfa = load_ingested(paths, "ALFA");
	EXPECT_TRUE(std::any_of(alfa.sentiment.begin(), alfa.sentiment.end(), [](double s) { return s != 0.0; }));
	EXPECT_TRUE(fs::is_regular_file(paths.repair_log("ALFA")));
	EXPECT_TRUE(fs::is_regular_file(paths.daily_sentiment("ALFA")));
}

TEST(Pipeline, CorruptCsvNamesAssetAndLine) {
	const fs::path dir = scratch("corrupt");
	std::string prices = slurp(kFixture / "ALFA_prices.csv");
	const auto third = prices.find('\n', prices.find('\n', prices.find('\n') + 1) + 1);
	prices.insert(third + 1, "2022-01-06,oops,1,1,1,1,1\n");
	spit(dir / "ALFA_prices.csv", prices);
	RunConfig c = small_run_config(dir / "out");
	c.assets = {{"ALFA", dir / "ALFA_prices.csv", std::nullopt}};
	try {
		cmd_ingest(c, {}, ignore_warning);
		FAIL();
	} catch (const DataError &e) {
		EXPECT_NE(std::string(e.what()).find("asset ALFA"), std::string::npos) << e.what();
		EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
	}
}

TEST(Pipeline, UnknownAssetIsUsageError) {
	const RunConfig c = small_run_config(scratch("unknown"));
	EXPECT_THROW(cmd_ingest(c, {"NOPE"}, ignore_warning), UsageError);
}

class PipelineRun : public ::testing::Test {
protected:
	static void SetUpTestSuite() {
		out_ = new fs::path(scratch("run"));
		const RunConfig c = small_run_config(*out_);
		result_ = new EvaluationOutput(cmd_run(c, {}, kAll, ignore_warning));
	}
	static void TearDownTestSuite() {
		delete result_;
		delete out_;
	}
	static fs::path *out_;
	static EvaluationOutput *result_;
};

fs::path *PipelineRun::out_ = nullptr;
EvaluationOutput *PipelineRun::result_ = nullptr;

TEST_F(PipelineRun, EmitsEveryArtifactReportAndPlot) {
	const OutputPaths p{*out_};
	for (const char *sym : {"ALFA", "GOLF"}) {
		EXPECT_TRUE(fs::is_regular_file(p.dataset(sym)));
		for (ModelKind m : kAllModels) {
			EXPECT_TRUE(fs::is_regular_file(p.artifact(sym, m)));
			EXPECT_TRUE(fs::is_regular_file(p.train_log(sym, m)));
			EXPECT_TRUE(fs::is_regular_file(p.report(sym, m)));
			EXPECT_TRUE(fs::is_regular_file(p.plot_svg(sym, m)));
			EXPECT_TRUE(fs::is_regular_file(p.plot_csv(sym, m)));
		}
	}
	EXPECT_EQ(result_->reports.size(), 6u);
	EXPECT_EQ(result_->aggregate.rows.size(), 3u);
	EXPECT_EQ(slurp(p.aggregate_csv()).substr(0, 32), "model,mean_rmse,median_rmse,wins");
	EXPECT_NE(result_->summary.find("0 violations"), std::string::npos);
}

TEST_F(PipelineRun, ReportRowCountsFollowSplits) {
	// 260 days, L = 5: 255 windows
	for (const auto &r : result_->reports) {
		const std::size_t expected = r.model == ModelKind::arima ? 255 - 229 : r.model == ModelKind::lstm ? 255 - 178 : 20;
		EXPECT_EQ(r.rows.size(), expected) << r.symbol << " " << to_string(r.model);
		EXPECT_TRUE(audit_causality(r).empty());
	}
}

TEST_F(PipelineRun, ReportsRoundTripFromDisk) {
	const OutputPaths p{*out_};
	for (const auto &r : result_->reports) {
		const ForecastReport back = load_report(p, r.symbol, r.model);
		ASSERT_EQ(back.rows.size(), r.rows.size());
		for (std::size_t i = 0; i < r.rows.size(); ++i)
			EXPECT_EQ(back.rows[i].predicted, r.rows[i].predicted);
		std::ifstream csv(p.plot_csv(r.symbol, r.model));
		const auto points = read_plot_csv(csv);
		ASSERT_EQ(points.size(), r.rows.size());
		EXPECT_EQ(points.back().predicted, r.rows.back().predicted);
	}
}

TEST_F(PipelineRun, RetrainAndReevaluateAreByteIdentical) {
	const OutputPaths p{*out_};
	const std::string artifact = slurp(p.artifact("ALFA", ModelKind::gan));
	const std::string report = slurp(p.report("GOLF", ModelKind::lstm));
	const std::string aggregate = slurp(p.aggregate_csv());
	const RunConfig c = small_run_config(*out_);
	cmd_train(c, {}, kAll);
	cmd_evaluate(c, {}, kAll);
	EXPECT_EQ(slurp(p.artifact("ALFA", ModelKind::gan)), artifact);
	EXPECT_EQ(slurp(p.report("GOLF", ModelKind::lstm)), report);
	EXPECT_EQ(slurp(p.aggregate_csv()), aggregate);
}

TEST_F(PipelineRun, MissingArtifactNamesTheCell) {
	const fs::path copy = scratch("missing_artifact");
	fs::copy(*out_, copy, fs::copy_options::recursive);
	fs::remove(OutputPaths{copy}.artifact("GOLF", ModelKind::lstm));
	try {
		cmd_evaluate(small_run_config(copy), {}, kAll);
		FAIL();
	} catch (const DataError &e) {
		EXPECT_NE(std::string(e.what()).find("asset GOLF, model lstm"), std::string::npos) << e.what();
	}
}

TEST_F(PipelineRun, EvaluatingOnAChangedDatasetIsRejected) {
	const fs::path copy = scratch("changed_dataset");
	fs::copy(*out_, copy, fs::copy_options::recursive);
	const RunConfig c = small_run_config(copy);
	// dropping the last row shifts every boundary the artifact was stamped with
	std::string ds = slurp(OutputPaths{copy}.dataset("ALFA"));
	ds.resize(ds.rfind('\n', ds.size() - 2) + 1);
	spit(OutputPaths{copy}.dataset("ALFA"), ds);
	try {
		cmd_evaluate(c, {"ALFA"}, {ModelKind::lstm});
		FAIL();
	} catch (const DataError &e) {
		EXPECT_NE(std::string(e.what()).find("partition mismatch"), std::string::npos) << e.what();
	}
}

TEST_F(PipelineRun, PlotWithoutReportFails) {
	const fs::path copy = scratch("no_report");
	fs::copy(*out_, copy, fs::copy_options::recursive);
	fs::remove(OutputPaths{copy}.report("ALFA", ModelKind::arima));
	EXPECT_THROW(cmd_plot(small_run_config(copy), {"ALFA"}, {ModelKind::arima}), DataError);
}

TEST(Cli, ExitCodes) {
	const fs::path dir = scratch("cli");
	std::string output;
	EXPECT_EQ(run_cli("--help", &output), 0);
	EXPECT_EQ(run_cli("", &output), 64);
	EXPECT_EQ(run_cli("train --model xgboost --config " + (kFixture / "config.json").string(), &output), 64);
	EXPECT_NE(output.find("xgboost"), std::string::npos);
	EXPECT_EQ(run_cli("train", &output), 64);
	EXPECT_EQ(run_cli("evaluate --from-metrics " + (dir / "none.csv").string(), &output), 2);

	std::string prices = slurp(kFixture / "ALFA_prices.csv");
	prices += "2023-12-29,1,2,3\n";
	spit(dir / "ALFA_prices.csv", prices);
	spit(dir / "config.json", R"({"seed": 1, "lexicon": ")" + kLexicon.string() +
								  R"(", "assets": [{"symbol": "ALFA", "prices": "ALFA_prices.csv"}]})");
	EXPECT_EQ(run_cli("ingest --config " + (dir / "config.json").string(), &output), 2);
	EXPECT_NE(output.find("line 262"), std::string::npos) << output;

	spit(dir / "noseed.json", R"({"lexicon": ")" + kLexicon.string() +
								  R"(", "assets": [{"symbol": "ALFA", "prices": "ALFA_prices.csv"}]})");
	EXPECT_EQ(run_cli("ingest --config " + (dir / "noseed.json").string(), &output), 64);
}

TEST(Cli, DivergentTrainingExitsWithInternalError) {
	const fs::path dir = scratch("cli_diverge");
	spit(dir / "config.json", small_config(dir / "out", ", \"learning_rate\": 1e200"));
	std::string output;
	ASSERT_EQ(run_cli("ingest --config " + (dir / "config.json").string(), &output), 0) << output;
	EXPECT_EQ(run_cli("train --model lstm --asset ALFA --config " + (dir / "config.json").string(), &output), 70);
	EXPECT_NE(output.find("ALFA/lstm"), std::string::npos) << output;
}

TEST(Cli, FromMetricsReproducesReferenceAggregate) {
	std::string output;
	ASSERT_EQ(run_cli("evaluate --from-metrics " + (kData / "reference_metrics.csv").string(), &output),
			  0);
	EXPECT_NE(output.find("arima   64.20       30.70         0"), std::string::npos) << output;
	EXPECT_NE(output.find("lstm    24.86       11.21         4"), std::string::npos) << output;
	EXPECT_NE(output.find("gan     12.22       9.33          3"), std::string::npos) << output;
}

TEST(Cli, SeedFlagOverridesConfig) {
	const fs::path a = scratch("cli_seed_a"), b = scratch("cli_seed_b");
	spit(a / "config.json", small_config(a / "out"));
	spit(b / "config.json", small_config(b / "out"));
	for (const auto &d : {a, b})
		ASSERT_EQ(run_cli("ingest --config " + (d / "config.json").string()), 0);
	ASSERT_EQ(run_cli("train --model gan --asset GOLF --config " + (a / "config.json").string()), 0);
	ASSERT_EQ(run_cli("train --model gan --asset GOLF --seed 12 --config " + (b / "config.json").string()), 0);
	EXPECT_NE(slurp(a / "out/models/GOLF/gan.json"), slurp(b / "out/models/GOLF/gan.json"));
	EXPECT_FALSE(fs::exists(b / "out/models/ALFA/gan.json"));
}
