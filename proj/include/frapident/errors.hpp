#ifndef FRAPIDENT_ERRORS_HPP
#define FRAPIDENT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace frapident {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A parameter or field is negative where only non-negative values are admissible.
struct NonNegativityViolation : Error {
    std::string field;
    explicit NonNegativityViolation(std::string f)
        : Error("non-negative constraint violated: " + f), field(std::move(f)) {}
};

// A parameter or field is NaN or infinite.
struct NonFinite : Error {
    std::string field;
    explicit NonFinite(std::string f)
        : Error("non-finite value: " + f), field(std::move(f)) {}
};

// Grid spacing too large to resolve the bleach spot.
struct GridTooCoarse : Error {
    explicit GridTooCoarse(const std::string& msg) : Error(msg) {}
};

// Field arrays do not match the grid/propagator shape.
struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

// Two curves do not share the same time vector.
struct TimeGridMismatch : Error {
    explicit TimeGridMismatch(const std::string& msg) : Error(msg) {}
};

// Contour trace started outside the slope-field hull.
struct ExitedField : Error {
    explicit ExitedField(const std::string& msg) : Error(msg) {}
};

// Catch-all for violated preconditions (bad sigma, empty grids, ...).
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

}  // namespace frapident

#endif
