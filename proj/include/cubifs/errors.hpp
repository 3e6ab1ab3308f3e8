#pragma once

#include <stdexcept>
#include <string>

namespace cubifs {

// Error taxonomy used across the library. The CLI maps these onto distinct
// exit codes (usage / validation / numerical).

// Invalid argument or parameter outside its mathematical domain.
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A closed-form estimator cannot be evaluated for this input.
class estimation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data too degenerate to work with (single category, no mass where
// mass is required, ...).
class degenerate_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or otherwise unusable intermediate numeric result.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files or cells that fail validation.
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An intuitionistic-fuzzy constraint (mu + nu <= 1) was violated.
class consistency_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cubifs
