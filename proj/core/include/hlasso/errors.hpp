#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace hlasso {

/// Malformed or inconsistent user input (bad dimensions, out-of-range indices,
/// degenerate columns, non-finite values).
class InputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative solver ran out of iterations. The last iterate is kept so the
/// caller can inspect or reuse it.
class ConvergenceError : public std::runtime_error
{
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate))
    {}

    const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }

private:
    Eigen::VectorXd last_iterate_;
};

} // namespace hlasso
