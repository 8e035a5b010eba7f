#pragma once

#include <stdexcept>
#include <string>

namespace strideflex {

/// Input violates a documented contract (bad CSV row, unbalanced design,
/// degenerate geometry, ...). The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace strideflex
