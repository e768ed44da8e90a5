#pragma once

#include <stdexcept>
#include <string>

namespace sgkdv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Raised when a time step blows up (norm growth or non-finite values).
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, double time);
    double time() const { return time_; }

private:
    double time_;
};

// The quadrature could not reach its error target within budget.
class QuadratureFailure : public Error {
public:
    QuadratureFailure(const std::string& what, double achieved_error);
    double achieved_error() const { return achieved_; }

private:
    double achieved_;
};

void require(bool condition, const std::string& message);

}  // namespace sgkdv
