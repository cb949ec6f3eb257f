#pragma once

#include <stdexcept>
#include <string>

namespace sparc {

// Error taxonomy shared with the C API status codes.
enum class ErrorCode {
    InvalidArgument = 1,
    Precondition = 2,     // a declared mathematical precondition failed
    NonConvergence = 3,
    Memory = 4,
    Numeric = 5,
    Internal = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
    ErrorCode code;
};

inline void require(bool ok, ErrorCode c, const std::string& msg) {
    if (!ok) throw Error(c, msg);
}

} // namespace sparc
