#ifndef ROBUSTSOS_ERRORS_HPP
#define ROBUSTSOS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace robustsos {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite or out-of-contract argument.
struct InvalidInput : Error {
    explicit InvalidInput(const std::string& msg) : Error("invalid input: " + msg) {}
};

// Matrix eigenvalue below the configured floor where an inverse power is required.
struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& msg) : Error("singular matrix: " + msg) {}
};

// A requested basis or block size exceeds the configured cap (or machine range).
struct CapacityExceeded : Error {
    explicit CapacityExceeded(const std::string& msg) : Error("capacity exceeded: " + msg) {}
};

// Polynomial degree too high for the pseudo-expectation it is applied to.
struct DegreeExceeded : Error {
    explicit DegreeExceeded(const std::string& msg) : Error("degree exceeded: " + msg) {}
};

}  // namespace robustsos

#endif
