#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlb {

enum class ErrorKind {
    InvalidArgument,
    NotInSpan,
    DegenerateBasis,
    WeightSum,
    InvalidWiring,
    InvalidBox,
    UnsupportedClass,
    DepthLimit,
    MissingPartition,
    NotSymmetric,
    ImperfectStrategy,
    ParameterTooSmall,
    TooLarge,
    NotAutomorphism,
    DimensionLimit,
    InvalidKey,
    NotHermitianUnitary,
    OutOfRange,
    NonCommuting,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Collapse threshold for the CHSH winning probability, (3 + sqrt 6) / 6.
inline constexpr long double kCollapseThresholdL =
    0.908248290463863016366214012450981899302660017371416453114L;
inline constexpr double kCollapseThreshold = static_cast<double>(kCollapseThresholdL);

inline constexpr double kExactTol = 1e-12;
inline constexpr double kComputedTol = 1e-9;

// One violated (or checked) constraint of a validation pass.
struct Residual {
    std::string condition;
    double value = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Residual> failures;
    double max_residual = 0.0;

    void check(const std::string& condition, double residual, double tol) {
        if (residual > max_residual) max_residual = residual;
        if (residual > tol) {
            ok = false;
            failures.push_back({condition, residual});
        }
    }
    std::string summary() const;
};

}  // namespace nlb
