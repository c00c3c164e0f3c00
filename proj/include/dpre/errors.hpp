#pragma once

#include <stdexcept>
#include <string>

namespace dpre {

// Thrown when a numerical contract stated by a module (an identity,
// a tolerance, an inequality that must hold on every run) is violated.
// The CLI maps this to exit code 3, config errors to exit code 2.
class ContractViolation : public std::runtime_error {
public:
    explicit ContractViolation(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

} // namespace dpre
