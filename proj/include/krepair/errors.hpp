#pragma once

#include <stdexcept>
#include <string>

namespace krepair {

// A value or coordinate lies outside the space it is used with.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A caller broke a precondition (shape mismatch, missing slot, bad arity).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed input file; the message carries the field path.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace krepair
