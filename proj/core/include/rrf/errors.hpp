#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rrf {

// Argument shapes disagree (column count vs. input dimension and the like).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A label that does not belong to the loss's label set.
class LabelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested order not covered by the closed-form bound.
class UnsupportedOrder : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Loss became non-finite during optimization.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// The multi-layer construction needs more hidden nodes than allowed.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::size_t layer, std::size_t required, std::size_t budget)
        : std::runtime_error("layer " + std::to_string(layer) + " needs " +
                             std::to_string(required) + " atoms per component, budget is " +
                             std::to_string(budget)),
          layer_(layer), required_(required) {}

    std::size_t layer() const noexcept { return layer_; }
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t layer_;
    std::size_t required_;
};

}  // namespace rrf
