#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sentigan/data/synthetic.hpp"
#include "sentigan/gan/gan.hpp"
#include "sentigan/numkernel/gradcheck.hpp"

using namespace sentigan;

namespace {

GanArchitecture tiny_arch() {
	GanArchitecture a;
	a.generator_hidden = {5, 4};
	a.discriminator_hidden = {4, 3};
	return a;
}

Vector random_vector(std::size_t n, Rng &rng, double bound = 1.0) {
	Vector v(n);
	for (double &x : v)
		x = rng.uniform(-bound, bound);
	return v;
}

std::vector<GanSample> random_batch(std::size_t n, std::size_t window, Rng &rng) {
	std::vector<GanSample> batch;
	for (std::size_t k = 0; k < n; ++k)
		batch.push_back({random_vector(window * kFeatureCount + 1, rng), random_vector(kFeatureCount, rng)});
	return batch;
}

void zero_network(Network &net) {
	for (auto p : net.parameters())
		for (double &v : p)
			v = 0.0;
}

// Zero-initialized biases put dead-layer units exactly on the relu kink,
// where central differences are meaningless.
void randomize_biases(Network &net, Rng &rng) {
	for (auto &l : net.layers())
		for (double &b : l.bias)
			b = rng.uniform(-0.5, 0.5);
}

std::vector<double> snapshot(const Network &net) { return flatten(net.parameters()); }

double max_rel_error(const std::vector<double> &analytic, const std::vector<double> &numeric) {
	double worst = 0.0;
	for (std::size_t i = 0; i < analytic.size(); ++i)
		worst = std::max(worst, relative_error(analytic[i], numeric[i]));
	return worst;
}

std::vector<double> flatten_grads(const Gradients &g) {
	std::vector<double> out;
	for (const auto &l : g.layers) {
		out.insert(out.end(), l.weights.data().begin(), l.weights.data().end());
		out.insert(out.end(), l.bias.begin(), l.bias.end());
	}
	return out;
}

} // namespace

TEST(GanGenerator, OutputWidthIsSixForAnyWindow) {
	Rng rng(3);
	for (std::size_t L : {1, 2, 7, 20}) {
		const Generator g = make_generator(L, {}, rng);
		EXPECT_EQ(generator_forward(g, random_vector(L * kFeatureCount + 1, rng)).size(), kFeatureCount);
	}
}

TEST(GanGenerator, ZeroWeightsGiveTanhOfLastBias) {
	Rng rng(4);
	Generator g = make_generator(3, tiny_arch(), rng);
	zero_network(g.net);
	auto &last = g.net.layers().back();
	for (std::size_t k = 0; k < kFeatureCount; ++k)
		last.bias[k] = 0.3 * static_cast<double>(k) - 0.8;
	const Vector y = generator_forward(g, random_vector(g.condition_size(), rng));
	for (std::size_t k = 0; k < kFeatureCount; ++k)
		EXPECT_DOUBLE_EQ(y[k], std::tanh(last.bias[k]));
}

TEST(GanGenerator, DeterministicWithoutNoise) {
	Rng rng(5);
	const Generator g = make_generator(4, {}, rng);
	const Vector c = random_vector(g.condition_size(), rng);
	EXPECT_EQ(generator_forward(g, c), generator_forward(g, c));
}

TEST(GanGenerator, OutputsStayInsideOpenInterval) {
	Rng rng(6);
	Generator g = make_generator(20, {}, rng);
	for (int i = 0; i < 200; ++i)
		for (double y : generator_forward(g, random_vector(g.condition_size(), rng))) {
			EXPECT_GT(y, -1.0);
			EXPECT_LT(y, 1.0);
		}
	// Far into saturation tanh rounds to +-1 in double precision but never beyond.
	for (auto p : g.net.parameters())
		for (double &v : p)
			v *= 10.0;
	for (int i = 0; i < 50; ++i)
		for (double y : generator_forward(g, random_vector(g.condition_size(), rng)))
			EXPECT_LE(std::abs(y), 1.0);
}

TEST(GanGenerator, ScaleViolationIsError) {
	Rng rng(7);
	const Generator g = make_generator(2, tiny_arch(), rng);
	Vector c(g.condition_size(), 0.5);
	c[3] = 1.0 + 1e-10;
	EXPECT_NO_THROW(generator_forward(g, c));
	c[3] = 1.0 + 1e-6;
	EXPECT_THROW(generator_forward(g, c), DataError);
	c[3] = 0.0;
	c.back() = -1.5; // sentiment
	EXPECT_THROW(generator_forward(g, c), DataError);
}

TEST(GanGenerator, DimensionMismatchIsError) {
	Rng rng(8);
	const Generator g = make_generator(2, tiny_arch(), rng);
	EXPECT_THROW(generator_forward(g, Vector(g.condition_size() + 1, 0.0)), DimensionError);
	EXPECT_THROW(generator_forward(g, Vector(g.condition_size(), 0.0), Vector(2, 0.0)), DimensionError);
}

TEST(GanDiscriminator, ZeroWeightsGiveExactlyHalf) {
	Rng rng(9);
	Discriminator d = make_discriminator(3, tiny_arch(), rng);
	zero_network(d.net);
	EXPECT_EQ(discriminator_forward(d, random_vector(kFeatureCount, rng), random_vector(d.condition_size(), rng)),
			  0.5);
}

TEST(GanDiscriminator, OutputStrictlyInsideUnitInterval) {
	Rng rng(10);
	const Discriminator d = make_discriminator(2, {}, rng);
	for (int i = 0; i < 200; ++i) {
		const double p =
			discriminator_forward(d, random_vector(kFeatureCount, rng, 5.0), random_vector(d.condition_size(), rng));
		EXPECT_GT(p, 0.0);
		EXPECT_LT(p, 1.0);
	}
}

TEST(GanDiscriminator, DimensionMismatchIsError) {
	Rng rng(11);
	const Discriminator d = make_discriminator(2, tiny_arch(), rng);
	EXPECT_THROW(discriminator_forward(d, Vector(5, 0.0), Vector(d.condition_size(), 0.0)), DimensionError);
	EXPECT_THROW(discriminator_forward(d, Vector(6, 0.0), Vector(d.condition_size() - 1, 0.0)), DimensionError);
}

TEST(GanGradients, ScoreWrtCandidateMatchesFiniteDifferences) {
	for (std::uint64_t seed = 1; seed <= 10; ++seed) {
		Rng rng(seed);
		Discriminator d = make_discriminator(2, tiny_arch(), rng);
		randomize_biases(d.net, rng);
		Vector candidate = random_vector(kFeatureCount, rng);
		const Vector condition = random_vector(d.condition_size(), rng);

		Network::Cache cache;
		d.net.forward(discriminator_input(d, candidate, condition), cache);
		Gradients scratch = d.net.zero_gradients();
		const double one = 1.0;
		const Vector din = d.net.backward(cache, std::span<const double>(&one, 1), scratch);
		const std::vector<double> analytic(din.begin(), din.begin() + kFeatureCount);

		const auto numeric = numeric_gradient([&] { return discriminator_forward(d, candidate, condition); },
											  {std::span<double>(candidate)});
		EXPECT_LT(max_rel_error(analytic, numeric), 1e-4) << "seed " << seed;
	}
}

TEST(GanGradients, DiscriminatorLossMatchesFiniteDifferences) {
	for (std::uint64_t seed = 1; seed <= 10; ++seed) {
		Rng rng(100 + seed);
		Discriminator d = make_discriminator(2, tiny_arch(), rng);
		randomize_biases(d.net, rng);
		const auto batch = random_batch(5, 2, rng);
		std::vector<Vector> fakes;
		for (std::size_t k = 0; k < batch.size(); ++k)
			fakes.push_back(random_vector(kFeatureCount, rng));

		Gradients grads = d.net.zero_gradients();
		discriminator_loss_grad(d, batch, fakes, &grads);
		const auto numeric =
			numeric_gradient([&] { return discriminator_loss_grad(d, batch, fakes, nullptr); }, d.net.parameters());
		EXPECT_LT(max_rel_error(flatten_grads(grads), numeric), 1e-4) << "seed " << seed;
	}
}

TEST(GanGradients, GeneratorLossThroughDiscriminatorMatchesFiniteDifferences) {
	for (std::uint64_t seed = 1; seed <= 10; ++seed) {
		for (double l2 : {0.0, 0.7}) {
			Rng rng(200 + seed);
			Generator g = make_generator(2, tiny_arch(), rng);
			Discriminator d = make_discriminator(2, tiny_arch(), rng);
			randomize_biases(g.net, rng);
			randomize_biases(d.net, rng);
			const auto batch = random_batch(5, 2, rng);

			Gradients grads = g.net.zero_gradients();
			generator_loss_grad(g, d, batch, run_generator(g, batch, nullptr), l2, &grads);
			const auto loss = [&] { return generator_loss_grad(g, d, batch, run_generator(g, batch, nullptr), l2, nullptr); };
			const auto numeric = numeric_gradient(loss, g.net.parameters());
			EXPECT_LT(max_rel_error(flatten_grads(grads), numeric), 1e-4) << "seed " << seed << " l2 " << l2;
		}
	}
}

TEST(GanLosses, PerfectDiscriminatorLimit) {
	// D reads only the candidate's first entry: +1 for real rows, about -1 for
	// the generator's saturated output.
	Rng rng(12);
	GanArchitecture arch;
	arch.generator_hidden = {3};
	arch.discriminator_hidden = {1};
	Generator g = make_generator(1, arch, rng);
	zero_network(g.net);
	for (double &b : g.net.layers().back().bias)
		b = -10.0;
	Discriminator d = make_discriminator(1, arch, rng);
	zero_network(d.net);
	d.net.layers()[0].weights(0, 0) = 1000.0;
	d.net.layers()[1].weights(0, 0) = 1.0;
	d.net.layers()[1].bias[0] = -500.0;

	auto batch = random_batch(5, 1, rng);
	for (auto &s : batch)
		s.real[0] = 1.0;
	const auto pass = run_generator(g, batch, nullptr);
	const double d_loss = discriminator_loss_grad(d, batch, pass.fakes, nullptr);
	const double g_loss = generator_loss_grad(g, d, batch, pass, 0.0, nullptr);
	EXPECT_LT(d_loss, 1e-6);
	EXPECT_GT(g_loss, 100.0);
	EXPECT_TRUE(std::isfinite(g_loss));
}

TEST(GanTrainStep, ZeroLearningRateLeavesParameters) {
	Rng rng(13);
	Generator g = make_generator(2, tiny_arch(), rng);
	Discriminator d = make_discriminator(2, tiny_arch(), rng);
	const auto batch = random_batch(5, 2, rng);
	GanOptimizers opt{AdamState(0.0), AdamState(0.0)};
	const auto g0 = snapshot(g.net), d0 = snapshot(d.net);
	const auto losses = gan_train_step(g, d, batch, opt, {}, rng);
	EXPECT_EQ(snapshot(g.net), g0);
	EXPECT_EQ(snapshot(d.net), d0);
	EXPECT_GT(losses.d_loss, 0.0);
	EXPECT_GT(losses.g_loss, 0.0);
}

TEST(GanTrainStep, AdamStepCountsFollowDSteps) {
	Rng rng(14);
	Generator g = make_generator(2, tiny_arch(), rng);
	Discriminator d = make_discriminator(2, tiny_arch(), rng);
	const auto batch = random_batch(5, 2, rng);
	GanOptimizers opt{AdamState(1e-3), AdamState(1e-3)};
	GanSchedule s;
	s.d_steps = 3;
	gan_train_step(g, d, batch, opt, s, rng);
	EXPECT_EQ(opt.discriminator.step_count, 3u);
	EXPECT_EQ(opt.generator.step_count, 1u);
	gan_train_step(g, d, batch, opt, s, rng);
	EXPECT_EQ(opt.discriminator.step_count, 6u);
	EXPECT_EQ(opt.generator.step_count, 2u);
}

TEST(GanTrainStep, EachUpdateTouchesOnlyItsOwnNetwork) {
	Rng rng(15);
	const Generator g0 = make_generator(2, tiny_arch(), rng);
	const Discriminator d0 = make_discriminator(2, tiny_arch(), rng);
	const auto batch = random_batch(5, 2, rng);

	// Freeze G: the D update must change D and nothing else.
	{
		Generator g = g0;
		Discriminator d = d0;
		GanOptimizers opt{AdamState(0.0), AdamState(1e-2)};
		gan_train_step(g, d, batch, opt, {}, rng);
		EXPECT_EQ(snapshot(g.net), snapshot(g0.net));
		EXPECT_NE(snapshot(d.net), snapshot(d0.net));
	}
	{
		Generator g = g0;
		Discriminator d = d0;
		GanOptimizers opt{AdamState(1e-2), AdamState(0.0)};
		gan_train_step(g, d, batch, opt, {}, rng);
		EXPECT_NE(snapshot(g.net), snapshot(g0.net));
		EXPECT_EQ(snapshot(d.net), snapshot(d0.net));
	}
}

TEST(GanTrainStep, DLossUsesRealAndFakeTerms) {
	Rng rng(16);
	const Discriminator d = make_discriminator(2, tiny_arch(), rng);
	const auto batch = random_batch(3, 2, rng);
	std::vector<Vector> fakes;
	for (std::size_t k = 0; k < batch.size(); ++k)
		fakes.push_back(random_vector(kFeatureCount, rng));
	double expected = 0.0;
	for (std::size_t k = 0; k < batch.size(); ++k) {
		const double pr = discriminator_forward(d, batch[k].real, batch[k].condition);
		const double pf = discriminator_forward(d, fakes[k], batch[k].condition);
		expected += -std::log(pr) - std::log(1.0 - pf);
	}
	EXPECT_NEAR(discriminator_loss_grad(d, batch, fakes, nullptr), expected / 3.0, 1e-12);
}

TEST(GanTrainStep, NonFiniteLossReportsStep) {
	Rng rng(17);
	Generator g = make_generator(2, tiny_arch(), rng);
	Discriminator d = make_discriminator(2, tiny_arch(), rng);
	d.net.layers()[0].weights(0, 0) = std::numeric_limits<double>::quiet_NaN();
	const auto batch = random_batch(5, 2, rng);
	GanOptimizers opt{AdamState(1e-3), AdamState(1e-3)};
	try {
		gan_train_step(g, d, batch, opt, {}, rng, 42);
		FAIL() << "expected TrainingError";
	} catch (const TrainingError &e) {
		EXPECT_EQ(e.index(), 42u);
	}
}

namespace {

std::vector<WindowSample> jump_train_windows(std::uint64_t seed, std::size_t days, std::size_t L) {
	JumpAssetParams p;
	p.days = days;
	return split(make_windows(sentiment_jump_asset(seed, p), L), SplitPolicy::holdout_last_20).train;
}

} // namespace

TEST(GanTrain, ZeroEpochsReturnsInitialNets) {
	const auto train = jump_train_windows(1, 60, 2);
	GanSchedule s;
	s.epochs = 0;
	const auto r = train_gan(train, 2, s, 9, tiny_arch());
	Rng rng(9);
	const Generator g = make_generator(2, tiny_arch(), rng);
	const Discriminator d = make_discriminator(2, tiny_arch(), rng);
	EXPECT_EQ(r.generator.net, g.net);
	EXPECT_EQ(r.discriminator.net, d.net);
	EXPECT_TRUE(r.log.empty());
	EXPECT_TRUE(r.generator.scaler.fitted());
}

TEST(GanTrain, SameSeedIsBitIdentical) {
	const auto train = jump_train_windows(2, 80, 2);
	GanSchedule s;
	s.epochs = 3;
	const auto a = train_gan(train, 2, s, 11, tiny_arch());
	const auto b = train_gan(train, 2, s, 11, tiny_arch());
	EXPECT_EQ(a.generator, b.generator);
	EXPECT_EQ(a.discriminator, b.discriminator);
	EXPECT_EQ(a.log, b.log);
	const auto c = train_gan(train, 2, s, 12, tiny_arch());
	EXPECT_NE(a.generator.net, c.generator.net);
}

TEST(GanTrain, LogHasOneEntryPerBatch) {
	const auto train = jump_train_windows(3, 60, 2); // 38 train windows -> 8 batches of <= 5
	GanSchedule s;
	s.epochs = 2;
	const auto r = train_gan(train, 2, s, 1, tiny_arch());
	ASSERT_EQ(r.log.size(), 16u);
	for (std::size_t i = 0; i < r.log.size(); ++i)
		EXPECT_EQ(r.log[i].step, i + 1);
	std::ostringstream out;
	write_gan_log(out, r.log);
	EXPECT_EQ(out.str().substr(0, 18), "step,d_loss,g_loss");
}

TEST(GanTrain, AveragingKeepsLastIterateSeparately) {
	const auto train = jump_train_windows(4, 60, 2);
	GanSchedule s;
	s.epochs = 2;
	const auto plain = train_gan(train, 2, s, 1, tiny_arch());
	EXPECT_EQ(plain.generator, plain.last_generator);
	s.generator_average = 0.9;
	const auto avg = train_gan(train, 2, s, 1, tiny_arch());
	EXPECT_EQ(avg.last_generator, plain.generator);
	EXPECT_NE(avg.generator.net, plain.generator.net);
	EXPECT_EQ(avg.log, plain.log);
}

TEST(GanTrain, ScheduleValidation) {
	const auto train = jump_train_windows(1, 60, 2);
	GanSchedule s;
	s.batch_size = 0;
	EXPECT_THROW(train_gan(train, 2, s, 1), UsageError);
	s = {};
	s.d_steps = 0;
	EXPECT_THROW(train_gan(train, 2, s, 1), UsageError);
	s = {};
	s.generator_average = 1.0;
	EXPECT_THROW(train_gan(train, 2, s, 1), UsageError);
	EXPECT_THROW(train_gan(train, 3, {}, 1), DimensionError);
}

TEST(GanTrain, SentimentOutsideRangeIsError) {
	auto train = jump_train_windows(1, 60, 2);
	train[4].sentiment = 1.2;
	EXPECT_THROW(train_gan(train, 2, {}, 1, tiny_arch()), DataError);
}

TEST(GanHoldout, TwentyCausalRowsWithPriceUnits) {
	JumpAssetParams p;
	p.days = 80;
	const auto ds = sentiment_jump_asset(5, p);
	const auto part = split(make_windows(ds, 3), SplitPolicy::holdout_last_20);
	GanSchedule s;
	s.epochs = 2;
	const auto r = train_gan(part.train, 3, s, 2, tiny_arch());
	const auto rows = forecast_holdout(r.generator, ds);
	ASSERT_EQ(rows.size(), 20u);
	for (std::size_t i = 0; i < rows.size(); ++i) {
		const std::size_t target = ds.size() - 20 + i;
		EXPECT_EQ(rows[i].date, ds.dates[target]);
		EXPECT_EQ(rows[i].input_end_date, ds.dates[target - 1]);
		EXPECT_LT(rows[i].input_end_date, rows[i].date);
		EXPECT_EQ(rows[i].actual, ds.features(target, kCloseColumn));
		// tanh output inverse-scaled into the training price range (plus margin)
		EXPECT_GT(rows[i].predicted, 50.0);
		EXPECT_LT(rows[i].predicted, 150.0);
	}
	// The holdout windows are exactly the test partition.
	ASSERT_EQ(part.test.size(), 20u);
	for (std::size_t i = 0; i < 20; ++i)
		EXPECT_EQ(part.test[i].target_date, rows[i].date);
}

TEST(GanHoldout, PredictionsIgnoreFutureRows) {
	JumpAssetParams p;
	p.days = 80;
	const auto ds = sentiment_jump_asset(6, p);
	const auto part = split(make_windows(ds, 3), SplitPolicy::holdout_last_20);
	GanSchedule s;
	s.epochs = 1;
	const auto r = train_gan(part.train, 3, s, 2, tiny_arch());
	const auto base = forecast_holdout(r.generator, ds);
	// Perturbing day k (and its sentiment) may only change predictions for targets after k.
	const std::size_t k = ds.size() - 10;
	AlignedDataset mutated = ds;
	for (std::size_t c = 0; c < kFeatureCount; ++c)
		mutated.features(k, c) *= 1.05;
	mutated.sentiment[k] = -mutated.sentiment[k];
	const auto after = forecast_holdout(r.generator, mutated);
	for (std::size_t i = 0; i < 20; ++i) {
		const std::size_t target = ds.size() - 20 + i;
		if (target <= k) {
			EXPECT_EQ(base[i].predicted, after[i].predicted) << "target " << target;
		}
	}
	EXPECT_NE(base[11].predicted, after[11].predicted);
}

TEST(GanHoldout, AutoregressiveDiffersFromTeacherForced) {
	JumpAssetParams p;
	p.days = 80;
	const auto ds = sentiment_jump_asset(7, p);
	const auto part = split(make_windows(ds, 3), SplitPolicy::holdout_last_20);
	GanSchedule s;
	s.epochs = 2;
	const auto r = train_gan(part.train, 3, s, 2, tiny_arch());
	const auto forced = forecast_holdout(r.generator, ds);
	HoldoutOptions opt;
	opt.autoregressive = true;
	const auto free_run = forecast_holdout(r.generator, ds, opt);
	EXPECT_EQ(forced[0].predicted, free_run[0].predicted);
	bool differs = false;
	for (std::size_t i = 1; i < 20; ++i)
		differs = differs || forced[i].predicted != free_run[i].predicted;
	EXPECT_TRUE(differs);
}

TEST(GanHoldout, InsufficientHistoryIsError) {
	JumpAssetParams p;
	p.days = 60;
	const auto ds = sentiment_jump_asset(8, p);
	const auto part = split(make_windows(ds, 3), SplitPolicy::holdout_last_20);
	GanSchedule s;
	s.epochs = 0;
	auto r = train_gan(part.train, 3, s, 2, tiny_arch());
	AlignedDataset shortened = ds;
	shortened.dates.resize(22);
	shortened.features = ds.features.slice_rows(0, 22);
	shortened.sentiment.resize(22);
	shortened.sentiment_count.resize(22);
	EXPECT_THROW(forecast_holdout(r.generator, shortened), DataError);
	Generator unfitted = r.generator;
	unfitted.scaler = {};
	EXPECT_THROW(forecast_holdout(unfitted, ds), StateError);
}

TEST(GanHoldout, ClampsOutOfRangeInputsAndCounts) {
	JumpAssetParams p;
	p.days = 80;
	AlignedDataset ds = sentiment_jump_asset(9, p);
	const auto part = split(make_windows(ds, 3), SplitPolicy::holdout_last_20);
	GanSchedule s;
	s.epochs = 0;
	const auto r = train_gan(part.train, 3, s, 2, tiny_arch());
	HoldoutDiagnostics diag;
	forecast_holdout(r.generator, ds, {}, &diag);
	const std::size_t before = diag.clamped_inputs;
	ds.features(ds.size() - 5, kCloseColumn) = 1e6; // seen by 3 windows
	forecast_holdout(r.generator, ds, {}, &diag);
	EXPECT_EQ(diag.clamped_inputs, before + 3);
}

TEST(GanScaling, InverseRestoresPriceUnits) {
	const auto train = jump_train_windows(10, 80, 2);
	const ScalerParams scaler = fit_window_scaler(train, ScaleMode::minmax_signed);
	for (const auto &w : train) {
		const Vector scaled = scale_row(scaler, w.target);
		for (std::size_t c = 0; c < kFeatureCount; ++c) {
			EXPECT_LE(std::abs(scaled[c]), 1.0 + kScaleTolerance);
			EXPECT_NEAR(scaler.inverse(c, scaled[c]), w.target[c], 1e-9 * std::max(1.0, std::abs(w.target[c])));
		}
	}
}

TEST(GanSynthetic, BeatsPersistenceAndRespondsToSentiment) {
	const std::size_t L = 1;
	const auto ds = sentiment_jump_asset(1);
	const auto part = split(make_windows(ds, L), SplitPolicy::holdout_last_20);
	GanSchedule s;
	s.epochs = 150;
	s.generator_average = 0.999;
	const auto r = train_gan(part.train, L, s, 1);
	const auto rows = forecast_holdout(r.generator, ds);
	double se = 0.0, sp = 0.0;
	for (std::size_t i = 0; i < rows.size(); ++i) {
		const double prev = ds.features(ds.size() - 20 + i - 1, kCloseColumn);
		se += std::pow(rows[i].predicted - rows[i].actual, 2);
		sp += std::pow(prev - rows[i].actual, 2);
	}
	EXPECT_LT(std::sqrt(se / 20.0), std::sqrt(sp / 20.0));

	AlignedDataset flipped = ds;
	for (double &v : flipped.sentiment)
		v = -v;
	const auto rows_flipped = forecast_holdout(r.generator, flipped);
	double delta = 0.0;
	for (std::size_t i = 0; i < rows.size(); ++i)
		delta += std::abs(rows[i].predicted - rows_flipped[i].predicted);
	EXPECT_GT(delta / 20.0, 0.0);
}

TEST(GanJson, RoundTrip) {
	const auto train = jump_train_windows(11, 60, 2);
	GanSchedule s;
	s.epochs = 1;
	const auto r = train_gan(train, 2, s, 3, tiny_arch());
	const Generator g = generator_from_json(nlohmann::json::parse(generator_to_json(r.generator).dump()));
	const Discriminator d = discriminator_from_json(nlohmann::json::parse(discriminator_to_json(r.discriminator).dump()));
	EXPECT_EQ(g, r.generator);
	EXPECT_EQ(d, r.discriminator);
	auto bad = generator_to_json(r.generator);
	bad["window"] = 5;
	EXPECT_THROW(generator_from_json(bad), DimensionError);
}
