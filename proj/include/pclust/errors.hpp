#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pclust {

/// Parameter or result outside the domain where a quantity is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The time-varying parameter recursion produced a non-finite state.
class FilterDivergence : public std::runtime_error {
public:
    FilterDivergence(std::size_t index, const std::string& what)
        : std::runtime_error(what + " at t=" + std::to_string(index)), index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EstimationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input text does not follow the expected delimited layout.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A decimal price cannot be represented exactly at the requested tick scale.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularDesign : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pclust
