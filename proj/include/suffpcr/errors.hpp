#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace suffpcr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error
{
public:
    using Error::Error;
};

class InvalidSpec : public Error
{
public:
    using Error::Error;
};

/// Raised by find_threshold when the leverage vector is too short for the
/// elbow rule; callers retain every row.
class DegenerateInput : public Error
{
public:
    using Error::Error;
};

/// Regression requested on an all-zero loading matrix.
class EmptyModel : public Error
{
public:
    using Error::Error;
};

class ConvergenceFailure : public Error
{
public:
    ConvergenceFailure(const std::string& what, double achieved_residual)
        : Error(what), residual_(achieved_residual)
    {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ParseError : public Error
{
public:
    // row and column are 1-based; 0 means "not applicable".
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what), row_(row), column_(column)
    {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class PipelineError : public Error
{
public:
    using Error::Error;
};

/// Experiment configuration does not match the schema. The CLI maps this to
/// exit status 2.
class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace suffpcr
