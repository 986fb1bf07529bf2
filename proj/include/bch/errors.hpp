#pragma once

#include <stdexcept>
#include <string>

namespace bch {

/// Raised when an integration or iteration produces non-finite values or
/// fails to converge. Argument errors use std::invalid_argument /
/// std::domain_error.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bch
