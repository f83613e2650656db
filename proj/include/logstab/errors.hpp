#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace logstab {

enum class ErrorKind {
    invalid_argument,
    no_convergence,
    unstable_drift,
    basis_overflow,
    ill_conditioned_spectrum,
    singular_gramian,
    degenerate_observation,
    dimension_mismatch,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::unstable_drift: return "unstable-drift";
    case ErrorKind::basis_overflow: return "basis-overflow";
    case ErrorKind::ill_conditioned_spectrum: return "ill-conditioned-spectrum";
    case ErrorKind::singular_gramian: return "singular-gramian";
    case ErrorKind::degenerate_observation: return "degenerate-observation";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    }
    return "unknown";
}

namespace detail {
[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::invalid_argument, what);
}
} // namespace detail

} // namespace logstab
