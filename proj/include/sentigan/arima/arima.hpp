#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentigan/arima/adf.hpp"
#include "sentigan/errors.hpp"
#include "sentigan/numkernel/matrix.hpp"

namespace sentigan {

struct ArimaOrder {
	std::size_t p = 0, d = 0, q = 0;

	std::string str() const {
		return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
	}
	friend bool operator==(const ArimaOrder &, const ArimaOrder &) = default;
};

struct ArimaModel {
	ArimaOrder order;
	double intercept = 0.0;
	Vector ar; // phi_1..phi_p
	Vector ma; // theta_1..theta_q
	double sigma2 = 0.0;
	double css = 0.0;
	std::size_t observations = 0; // residuals entering the CSS
	std::size_t iterations = 0;
	// Last max(p,q)+d training levels and last max(p,q) residuals.
	Vector tail_levels;
	Vector tail_residuals;

	friend bool operator==(const ArimaModel &, const ArimaModel &) = default;
};

struct ArimaFitOptions {
	std::size_t max_iterations = 500;
	double tolerance = 1e-10;
};

namespace detail {

// One-step residuals of w_t = c + sum phi_i w_{t-i} + e_t + sum theta_j e_{t-j},
// with e_t = 0 before `start`.
inline Vector arma_residuals(const Vector &w, double c, const Vector &ar, const Vector &ma, std::size_t start) {
	Vector e(w.size(), 0.0);
	for (std::size_t t = start; t < w.size(); ++t) {
		double v = w[t] - c;
		for (std::size_t i = 0; i < ar.size(); ++i)
			v -= ar[i] * w[t - 1 - i];
		for (std::size_t j = 0; j < ma.size() && j < t; ++j)
			v -= ma[j] * e[t - 1 - j];
		e[t] = v;
	}
	return e;
}

inline double sum_squares(const Vector &e, std::size_t start) {
	double s = 0.0;
	for (std::size_t t = start; t < e.size(); ++t)
		s += e[t] * e[t];
	return s;
}

// True when 1 - c_1 z - ... - c_k z^k has every root outside the unit
// circle, by the step-down recursion on reflection coefficients.
inline bool roots_outside_unit_circle(Vector c) {
	for (std::size_t m = c.size(); m > 0; --m) {
		const double k = c[m - 1];
		if (!(std::abs(k) < 1.0))
			return false;
		Vector next(m - 1);
		for (std::size_t j = 1; j < m; ++j)
			next[j - 1] = (c[j - 1] + k * c[m - 1 - j]) / (1.0 - k * k);
		c = std::move(next);
	}
	return true;
}

} // namespace detail

inline bool ar_is_stationary(const Vector &ar) { return detail::roots_outside_unit_circle(ar); }

inline bool ma_is_invertible(const Vector &ma) {
	Vector neg(ma.size());
	for (std::size_t i = 0; i < ma.size(); ++i)
		neg[i] = -ma[i];
	return detail::roots_outside_unit_circle(neg);
}

namespace detail {

struct CssFit {
	Vector params; // c, phi..., theta...
	double css = 0.0;
	std::size_t iterations = 0;
};

// Levenberg-Marquardt on the residual vector. The Jacobian follows the
// same recursion as the residuals, so it is exact for the conditional model.
// Steps leaving the stationary and invertible region are rejected.
inline CssFit fit_css(const Vector &w, std::size_t p, std::size_t q, std::size_t start, const ArimaFitOptions &opt) {
	const std::size_t k = 1 + p + q;
	Vector x(k, 0.0);
	auto unpack = [&](const Vector &params, double &c, Vector &ar, Vector &ma) {
		c = params[0];
		ar.assign(params.begin() + 1, params.begin() + 1 + static_cast<std::ptrdiff_t>(p));
		ma.assign(params.begin() + 1 + static_cast<std::ptrdiff_t>(p), params.end());
	};
	auto evaluate = [&](const Vector &params) {
		double c;
		Vector ar, ma;
		unpack(params, c, ar, ma);
		if (!ar_is_stationary(ar) || !ma_is_invertible(ma))
			return std::pair{Vector{}, std::numeric_limits<double>::infinity()};
		Vector e = arma_residuals(w, c, ar, ma, start);
		return std::pair{e, sum_squares(e, start)};
	};

	auto [e, css] = evaluate(x);
	double lambda = 1e-3;
	double grad_norm = 0.0;
	for (std::size_t iter = 1; iter <= opt.max_iterations; ++iter) {
		double c;
		Vector ar, ma;
		unpack(x, c, ar, ma);
		// J(t, a) = d e_t / d x_a
		Matrix jac(w.size(), k);
		for (std::size_t t = start; t < w.size(); ++t) {
			jac(t, 0) = -1.0;
			for (std::size_t i = 0; i < p; ++i)
				jac(t, 1 + i) = -w[t - 1 - i];
			for (std::size_t j = 0; j < q; ++j)
				jac(t, 1 + p + j) = t >= 1 + j ? -e[t - 1 - j] : 0.0;
			for (std::size_t j = 0; j < q && j < t; ++j)
				for (std::size_t a = 0; a < k; ++a)
					jac(t, a) -= ma[j] * jac(t - 1 - j, a);
		}
		Matrix jtj(k, k);
		Vector g(k, 0.0);
		for (std::size_t t = start; t < w.size(); ++t) {
			const auto row = jac.row(t);
			for (std::size_t a = 0; a < k; ++a) {
				g[a] += row[a] * e[t];
				for (std::size_t b = 0; b < k; ++b)
					jtj(a, b) += row[a] * row[b];
			}
		}
		grad_norm = 0.0;
		for (double v : g)
			grad_norm += v * v;
		grad_norm = std::sqrt(grad_norm);
		if (grad_norm == 0.0)
			return {x, css, iter};

		bool improved = false;
		while (lambda < 1e16) {
			Matrix a = jtj;
			for (std::size_t d = 0; d < k; ++d)
				a(d, d) += lambda * std::max(jtj(d, d), 1e-12);
			Vector rhs(k), step;
			for (std::size_t d = 0; d < k; ++d)
				rhs[d] = -g[d];
			if (solve_linear(a, rhs, step)) {
				Vector trial = x;
				for (std::size_t d = 0; d < k; ++d)
					trial[d] += step[d];
				auto [te, tcss] = evaluate(trial);
				if (std::isfinite(tcss) && tcss <= css) {
					const double rel = (css - tcss) / std::max(css, std::numeric_limits<double>::min());
					x = std::move(trial);
					e = std::move(te);
					css = tcss;
					lambda = std::max(lambda * 0.1, 1e-12);
					improved = true;
					if (rel < opt.tolerance)
						return {x, css, iter};
					break;
				}
			}
			lambda *= 10.0;
		}
		if (!improved)
			return {x, css, iter}; // no descent step exists at machine precision
	}
	throw TrainingError("ARIMA CSS fit did not converge; final gradient norm " + std::to_string(grad_norm),
						opt.max_iterations);
}

inline ArimaModel make_model(const Vector &y, const Vector &w, ArimaOrder order, const CssFit &fit,
							 std::size_t start) {
	ArimaModel m;
	m.order = order;
	m.intercept = fit.params[0];
	m.ar.assign(fit.params.begin() + 1, fit.params.begin() + 1 + static_cast<std::ptrdiff_t>(order.p));
	m.ma.assign(fit.params.begin() + 1 + static_cast<std::ptrdiff_t>(order.p), fit.params.end());
	m.css = fit.css;
	m.observations = w.size() - start;
	m.sigma2 = fit.css / static_cast<double>(m.observations);
	m.iterations = fit.iterations;
	const std::size_t keep = std::max(order.p, order.q);
	const Vector e = arma_residuals(w, m.intercept, m.ar, m.ma, start);
	m.tail_levels.assign(y.end() - static_cast<std::ptrdiff_t>(std::min(y.size(), keep + order.d)), y.end());
	m.tail_residuals.assign(e.end() - static_cast<std::ptrdiff_t>(std::min(e.size(), keep)), e.end());
	return m;
}

} // namespace detail

/// Conditional-sum-of-squares fit on the d-times differenced series.
inline ArimaModel fit_arima(const Vector &train, ArimaOrder order, const ArimaFitOptions &opt = {}) {
	if (order.d > 2)
		throw UsageError("ARIMA differencing order must be 0, 1 or 2");
	if (train.size() <= order.p + order.q + order.d + 10)
		throw DataError("ARIMA" + order.str() + " needs more than " + std::to_string(order.p + order.q + order.d + 10) +
						" observations, have " + std::to_string(train.size()));
	if (!all_finite(train))
		throw DataError("ARIMA training series contains non-finite values");
	const Vector w = difference(train, order.d);
	const auto fit = detail::fit_css(w, order.p, order.q, order.p, opt);
	return detail::make_model(train, w, order, fit, order.p);
}

inline double arima_aic(double css, std::size_t n, std::size_t p, std::size_t q) {
	const double nn = static_cast<double>(n);
	const double floor = std::numeric_limits<double>::min();
	return nn * std::log(std::max(css, floor) / nn) + 2.0 * static_cast<double>(p + q + 1);
}

struct OrderCandidate {
	std::size_t p = 0, q = 0;
	double css = 0.0;
	double aic = 0.0;
	bool ok = false;
	std::string error;
};

struct OrderSelection {
	ArimaOrder order;
	std::vector<AdfResult> adf; // one per differencing level tried
	std::vector<OrderCandidate> grid;
};

/// Smallest d passing the ADF gate, then (p, q) minimizing AIC. Every grid
/// cell conditions on the same first p_max differenced values so the
/// criteria compare the same residuals.
inline OrderSelection select_order(const Vector &train, std::size_t p_max = 3, std::size_t q_max = 3,
								   const ArimaFitOptions &opt = {}) {
	if (train.size() < 50)
		throw DataError("ARIMA order selection needs at least 50 observations, have " + std::to_string(train.size()));
	if (!all_finite(train))
		throw DataError("ARIMA training series contains non-finite values");
	OrderSelection sel;
	std::optional<std::size_t> d;
	for (std::size_t k = 0; k <= 2; ++k) {
		const Vector w = difference(train, k);
		sel.adf.push_back(adf_test(w));
		if (sel.adf.back().is_stationary) {
			d = k;
			break;
		}
	}
	if (!d)
		throw DataError("series is not stationary after two differences (ADF statistic " +
						std::to_string(sel.adf.back().statistic) +
						(sel.adf.back().diagnostic.empty() ? "" : ", " + sel.adf.back().diagnostic) + ")");
	const Vector w = difference(train, *d);
	if (w.size() <= p_max + p_max + q_max + 10)
		throw DataError("series too short for the ARIMA order grid");

	for (std::size_t p = 0; p <= p_max; ++p) {
		for (std::size_t q = 0; q <= q_max; ++q) {
			OrderCandidate c;
			c.p = p;
			c.q = q;
			try {
				const auto fit = detail::fit_css(w, p, q, p_max, opt);
				c.css = fit.css;
				c.aic = arima_aic(fit.css, w.size() - p_max, p, q);
				c.ok = std::isfinite(c.aic);
			} catch (const TrainingError &e) {
				c.error = e.what();
			}
			sel.grid.push_back(c);
		}
	}
	const OrderCandidate *best = nullptr;
	for (const auto &c : sel.grid) {
		if (!c.ok)
			continue;
		if (!best || c.aic < best->aic ||
			(c.aic == best->aic && (c.p + c.q < best->p + best->q || (c.p + c.q == best->p + best->q && c.p < best->p))))
			best = &c;
	}
	if (!best)
		throw TrainingError("no ARIMA grid cell could be fitted", 0);
	sel.order = {best->p, *d, best->q};
	return sel;
}

/// Level forecast from a forecast of the d-th difference: y_{n+1} = w_hat + sum_k (Δ^k y)_n.
inline double integrate_forecast(const Vector &history, double differenced_forecast, std::size_t d) {
	double level = differenced_forecast;
	Vector cur = history;
	for (std::size_t k = 0; k < d; ++k) {
		level += cur.back();
		cur = difference(cur);
	}
	return level;
}

/// Next-value forecast on the original scale. Residuals are recomputed over
/// the whole history with the fitted coefficients.
inline double forecast_one_step(const ArimaModel &m, const Vector &history) {
	const ArimaOrder &o = m.order;
	const std::size_t need = o.d + std::max<std::size_t>({o.p, o.q, 1});
	if (history.size() < need)
		throw DataError("ARIMA" + o.str() + " forecast needs at least " + std::to_string(need) +
						" history values, have " + std::to_string(history.size()));
	const Vector w = difference(history, o.d);
	const Vector e = detail::arma_residuals(w, m.intercept, m.ar, m.ma, o.p);
	const std::size_t n = w.size();
	double next = m.intercept;
	for (std::size_t i = 0; i < o.p; ++i)
		next += m.ar[i] * w[n - 1 - i];
	for (std::size_t j = 0; j < o.q && j < n; ++j)
		next += m.ma[j] * e[n - 1 - j];
	return integrate_forecast(history, next, o.d);
}

struct RollingOptions {
	bool refit_each_step = false;
	ArimaFitOptions fit;
};

/// One-step forecasts for each test point; forecast i sees train and test[0, i).
inline Vector rolling_forecast(const ArimaModel &model, const Vector &train, const Vector &test,
							   const RollingOptions &opt = {}) {
	Vector history = train;
	history.reserve(train.size() + test.size());
	Vector out;
	out.reserve(test.size());
	ArimaModel current = model;
	for (double actual : test) {
		if (opt.refit_each_step && history.size() > train.size())
			current = fit_arima(history, model.order, opt.fit);
		out.push_back(forecast_one_step(current, history));
		history.push_back(actual);
	}
	return out;
}

inline nlohmann::json arima_to_json(const ArimaModel &m) {
	return {{"order", {{"p", m.order.p}, {"d", m.order.d}, {"q", m.order.q}}},
			{"intercept", m.intercept},
			{"ar", m.ar},
			{"ma", m.ma},
			{"sigma2", m.sigma2},
			{"css", m.css},
			{"observations", m.observations},
			{"iterations", m.iterations},
			{"tail_levels", m.tail_levels},
			{"tail_residuals", m.tail_residuals}};
}

inline ArimaModel arima_from_json(const nlohmann::json &j) {
	ArimaModel m;
	const auto &o = j.at("order");
	m.order = {o.at("p").get<std::size_t>(), o.at("d").get<std::size_t>(), o.at("q").get<std::size_t>()};
	m.intercept = j.at("intercept").get<double>();
	m.ar = j.at("ar").get<Vector>();
	m.ma = j.at("ma").get<Vector>();
	if (m.ar.size() != m.order.p)
		throw DimensionError("ARIMA JSON ar coefficients", m.order.p, m.ar.size());
	if (m.ma.size() != m.order.q)
		throw DimensionError("ARIMA JSON ma coefficients", m.order.q, m.ma.size());
	m.sigma2 = j.at("sigma2").get<double>();
	if (m.sigma2 < 0.0)
		throw DataError("ARIMA JSON sigma2 is negative");
	m.css = j.value("css", 0.0);
	m.observations = j.value("observations", std::size_t{0});
	m.iterations = j.value("iterations", std::size_t{0});
	m.tail_levels = j.value("tail_levels", Vector{});
	m.tail_residuals = j.value("tail_residuals", Vector{});
	return m;
}

} // namespace sentigan
