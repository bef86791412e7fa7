#pragma once

#include <stdexcept>
#include <string>

namespace scenetok {

// Raised for every contract violation caused by caller-supplied data
// (bad sizes, out-of-range parameters, malformed files). The CLI maps it to
// exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InputError(message);
}

}  // namespace scenetok
