#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "sentigan/errors.hpp"

namespace sentigan {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
	Matrix() = default;
	Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
		: rows_(rows), cols_(cols), data_(rows * cols, fill) {}

	Matrix(std::initializer_list<std::initializer_list<double>> init) {
		rows_ = init.size();
		cols_ = rows_ ? init.begin()->size() : 0;
		data_.reserve(rows_ * cols_);
		for (const auto &row : init) {
			if (row.size() != cols_)
				throw DimensionError("Matrix initializer row length", cols_, row.size());
			data_.insert(data_.end(), row.begin(), row.end());
		}
	}

	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }
	std::size_t size() const { return data_.size(); }
	bool empty() const { return data_.empty(); }

	double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
	double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

	std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
	std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

	std::span<double> data() { return data_; }
	std::span<const double> data() const { return data_; }

	Vector column(std::size_t c) const {
		Vector out(rows_);
		for (std::size_t r = 0; r < rows_; ++r)
			out[r] = (*this)(r, c);
		return out;
	}

	void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

	void append_row(std::span<const double> values) {
		if (rows_ == 0 && cols_ == 0)
			cols_ = values.size();
		if (values.size() != cols_)
			throw DimensionError("Matrix::append_row", cols_, values.size());
		data_.insert(data_.end(), values.begin(), values.end());
		++rows_;
	}

	/// Rows [begin, end) as a new matrix.
	Matrix slice_rows(std::size_t begin, std::size_t end) const {
		Matrix out(end - begin, cols_);
		std::copy(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
				  data_.begin() + static_cast<std::ptrdiff_t>(end * cols_), out.data_.begin());
		return out;
	}

	friend bool operator==(const Matrix &, const Matrix &) = default;

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	Vector data_;
};

/// y = M x
inline Vector matvec(const Matrix &m, std::span<const double> x) {
	if (x.size() != m.cols())
		throw DimensionError("matvec input length", m.cols(), x.size());
	Vector y(m.rows(), 0.0);
	for (std::size_t r = 0; r < m.rows(); ++r) {
		const double *w = m.row(r).data();
		double acc = 0.0;
		for (std::size_t c = 0; c < m.cols(); ++c)
			acc += w[c] * x[c];
		y[r] = acc;
	}
	return y;
}

/// y += Mᵀ g
inline void matvec_transposed_add(const Matrix &m, std::span<const double> g, std::span<double> y) {
	for (std::size_t r = 0; r < m.rows(); ++r) {
		const double *w = m.row(r).data();
		const double gr = g[r];
		if (gr == 0.0)
			continue;
		for (std::size_t c = 0; c < m.cols(); ++c)
			y[c] += w[c] * gr;
	}
}

/// M += g xᵀ
inline void outer_add(Matrix &m, std::span<const double> g, std::span<const double> x) {
	for (std::size_t r = 0; r < m.rows(); ++r) {
		double *w = m.row(r).data();
		const double gr = g[r];
		if (gr == 0.0)
			continue;
		for (std::size_t c = 0; c < m.cols(); ++c)
			w[c] += gr * x[c];
	}
}

inline bool all_finite(std::span<const double> v) {
	return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Returns false when A is numerically singular.
inline bool solve_linear(Matrix a, Vector b, Vector &x) {
	const std::size_t n = a.rows();
	if (a.cols() != n || b.size() != n)
		throw DimensionError("solve_linear system size", n, b.size());
	double scale = 0.0;
	for (double v : a.data())
		scale = std::max(scale, std::abs(v));
	if (scale == 0.0)
		return false;
	for (std::size_t k = 0; k < n; ++k) {
		std::size_t piv = k;
		for (std::size_t r = k + 1; r < n; ++r)
			if (std::abs(a(r, k)) > std::abs(a(piv, k)))
				piv = r;
		if (std::abs(a(piv, k)) <= 1e-13 * scale)
			return false;
		if (piv != k) {
			for (std::size_t c = 0; c < n; ++c)
				std::swap(a(k, c), a(piv, c));
			std::swap(b[k], b[piv]);
		}
		for (std::size_t r = k + 1; r < n; ++r) {
			const double f = a(r, k) / a(k, k);
			if (f == 0.0)
				continue;
			for (std::size_t c = k; c < n; ++c)
				a(r, c) -= f * a(k, c);
			b[r] -= f * b[k];
		}
	}
	x.assign(n, 0.0);
	for (std::size_t k = n; k-- > 0;) {
		double acc = b[k];
		for (std::size_t c = k + 1; c < n; ++c)
			acc -= a(k, c) * x[c];
		x[k] = acc / a(k, k);
	}
	return true;
}

/// Inverse of a small square matrix; returns false when singular.
inline bool invert(const Matrix &a, Matrix &inv) {
	const std::size_t n = a.rows();
	inv = Matrix(n, n);
	for (std::size_t c = 0; c < n; ++c) {
		Vector e(n, 0.0), x;
		e[c] = 1.0;
		if (!solve_linear(a, e, x))
			return false;
		for (std::size_t r = 0; r < n; ++r)
			inv(r, c) = x[r];
	}
	return true;
}

} // namespace sentigan
