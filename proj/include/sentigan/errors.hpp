#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentigan {

class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Malformed or invariant-violating input data.
class DataError : public Error {
public:
	using Error::Error;
};

class UsageError : public Error {
public:
	using Error::Error;
};

/// Operation invoked on an object in the wrong state (e.g. backward before forward).
class StateError : public Error {
public:
	using Error::Error;
};

class DimensionError : public Error {
public:
	DimensionError(const std::string &what, std::size_t expected, std::size_t actual)
		: Error(what + ": expected " + std::to_string(expected) + ", got " + std::to_string(actual)),
		  expected_(expected), actual_(actual) {}

	std::size_t expected() const { return expected_; }
	std::size_t actual() const { return actual_; }

private:
	std::size_t expected_;
	std::size_t actual_;
};

/// Numerical failure during fitting; `index` is the step, epoch or parameter it refers to.
class TrainingError : public Error {
public:
	TrainingError(const std::string &what, std::size_t index)
		: Error(what + " (at " + std::to_string(index) + ")"), index_(index) {}

	std::size_t index() const { return index_; }

private:
	std::size_t index_;
};

class FetchError : public Error {
public:
	FetchError(const std::string &what, int status)
		: Error(what + " (status " + std::to_string(status) + ")"), status_(status) {}

	int status() const { return status_; }

private:
	int status_;
};

} // namespace sentigan
