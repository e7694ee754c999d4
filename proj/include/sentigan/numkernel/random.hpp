#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sentigan {

/// Seeded generator whose draws are identical on every platform.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not, so uniform and normal variates are derived here.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	/// Uniform in [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	/// Standard normal via Box-Muller.
	double normal() {
		if (has_spare_) {
			has_spare_ = false;
			return spare_;
		}
		double u1 = uniform();
		while (u1 <= 0.0)
			u1 = uniform();
		const double u2 = uniform();
		const double r = std::sqrt(-2.0 * std::log(u1));
		const double theta = 2.0 * std::numbers::pi * u2;
		spare_ = r * std::sin(theta);
		has_spare_ = true;
		return r * std::cos(theta);
	}

	double normal(double mean, double stddev) { return mean + stddev * normal(); }

	/// Uniform integer in [0, n).
	std::uint64_t below(std::uint64_t n) {
		const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
		std::uint64_t x;
		do
			x = engine_();
		while (x >= limit);
		return x % n;
	}

	template <class It>
	void shuffle(It first, It last) {
		const auto n = last - first;
		for (auto i = n - 1; i > 0; --i) {
			const auto j = static_cast<decltype(i)>(below(static_cast<std::uint64_t>(i) + 1));
			std::swap(first[i], first[j]);
		}
	}

private:
	std::mt19937_64 engine_;
	double spare_ = 0.0;
	bool has_spare_ = false;
};

} // namespace sentigan
