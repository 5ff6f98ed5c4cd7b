#pragma once

#include <stdexcept>
#include <string>

namespace mt {

// Error taxonomy. Exit-code mapping used by the CLI:
//   kCheckFailure   -> exit 2 (a mathematical identity that must hold failed)
//   kPrecision      -> exit 3 (precision / branch / unsupported-context errors)
//   kUsage          -> exit 1 (bad input, schema, preconditions)
enum class ErrorKind {
    kUsage,
    kCheckFailure,
    kPrecision,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& code, const std::string& what)
        : std::runtime_error(code + ": " + what), kind_(kind), code_(code) {}

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

// Convenience constructors, names follow the operation contracts.
inline Error precision_insufficient(const std::string& w) {
    return Error(ErrorKind::kPrecision, "PrecisionInsufficient", w);
}
inline Error zero_series(const std::string& w) {
    return Error(ErrorKind::kUsage, "ZeroSeries", w);
}
inline Error tail_not_controlled(const std::string& w) {
    return Error(ErrorKind::kUsage, "TailNotControlled", w);
}
inline Error not_p_large(const std::string& w) {
    return Error(ErrorKind::kUsage, "NotPLarge", w);
}
inline Error ramified_context(const std::string& w) {
    return Error(ErrorKind::kPrecision, "RamifiedContext", w);
}
inline Error ramified_prime(const std::string& w) {
    return Error(ErrorKind::kPrecision, "RamifiedPrime", w);
}
inline Error zero_resultant(const std::string& w) {
    return Error(ErrorKind::kUsage, "ZeroResultant", w);
}
inline Error divisibility_fails(const std::string& w) {
    return Error(ErrorKind::kCheckFailure, "DivisibilityFails", w);
}
inline Error unsupported_character(const std::string& w) {
    return Error(ErrorKind::kUsage, "UnsupportedCharacter", w);
}
inline Error ambiguous_eigenspace(const std::string& w) {
    return Error(ErrorKind::kUsage, "AmbiguousEigenspace", w);
}
inline Error empty_eigenspace(const std::string& w) {
    return Error(ErrorKind::kUsage, "EmptyEigenspace", w);
}
inline Error schema_error(const std::string& w) {
    return Error(ErrorKind::kUsage, "SchemaError", w);
}
inline Error level_divisible_by_p(const std::string& w) {
    return Error(ErrorKind::kUsage, "LevelDivisibleByP", w);
}
inline Error missing_eigenvalues(const std::string& w) {
    return Error(ErrorKind::kUsage, "MissingEigenvalues", w);
}
inline Error unstable(const std::string& w) {
    return Error(ErrorKind::kPrecision, "Unstable", w);
}
inline Error no_fit(const std::string& w) {
    return Error(ErrorKind::kUsage, "NoFit", w);
}
inline Error wrong_weights(const std::string& w) {
    return Error(ErrorKind::kUsage, "WrongWeights", w);
}
inline Error unsupported_branch(const std::string& w) {
    return Error(ErrorKind::kPrecision, "UnsupportedBranch", w);
}
inline Error inconsistent_branches(const std::string& w) {
    return Error(ErrorKind::kCheckFailure, "InconsistentBranches", w);
}
inline Error internal_error(const std::string& w) {
    return Error(ErrorKind::kUsage, "InternalError", w);
}

}  // namespace mt
