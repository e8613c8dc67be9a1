#pragma once

#include <stdexcept>

namespace shillscore {

// Common error hierarchy. Loaders throw ParseError for malformed input and
// ValidationError when a record breaks a domain rule; IoError covers the
// filesystem. DomainError flags bad argument values.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct UnknownBidder : Error { using Error::Error; };
struct UnknownSeller : Error { using Error::Error; };
struct InvalidScenario : Error { using Error::Error; };

}  // namespace shillscore
