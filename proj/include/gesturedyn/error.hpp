#pragma once

#include <stdexcept>
#include <string>

namespace gesturedyn {

/// Thrown when an input violates an operation's precondition or a value
/// cannot be computed (singularity, degenerate design, step cap, ...).
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw error(what); }

inline void require(bool ok, const char* what) {
    if (!ok) fail(what);
}

}  // namespace detail
}  // namespace gesturedyn
