#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A field value that must be strictly positive is not (loss of positivity).
class NonPositiveField : public Error {
public:
    NonPositiveField(std::size_t node, double value)
        : Error("non-positive field value " + std::to_string(value) + " at node " +
                std::to_string(node)),
          node_(node),
          value_(value) {}

    std::size_t node() const noexcept { return node_; }
    double value() const noexcept { return value_; }

private:
    std::size_t node_;
    double value_;
};

class DomainNotMultipleOfPi : public Error {
public:
    explicit DomainNotMultipleOfPi(double a)
        : Error("interval length " + std::to_string(a) + " is not an integer multiple of pi") {}
};

class ExponentOutOfRange : public Error {
public:
    using Error::Error;
};

class NoRoot : public Error {
public:
    using Error::Error;
};

class StepCollapse : public Error {
public:
    explicit StepCollapse(double dt)
        : Error("time step collapsed below dt_min (dt = " + std::to_string(dt) + ")"), dt_(dt) {}
    double dt() const noexcept { return dt_; }

private:
    double dt_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nflow
