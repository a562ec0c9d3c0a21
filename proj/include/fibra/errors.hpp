#pragma once

#include <stdexcept>
#include <string>

namespace fibra {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parse/validation failure in predicate text or automaton files.
// `line` is 1-based when parsing files, `pos` is a token/char index otherwise.
struct SyntaxError : Error {
    int line = 0;
    int pos = 0;
    SyntaxError(const std::string& msg, int line_, int pos_)
        : Error(msg + " (line " + std::to_string(line_) + ", pos " + std::to_string(pos_) + ")"),
          line(line_), pos(pos_) {}
    explicit SyntaxError(const std::string& msg) : Error(msg) {}
};

// Name resolution, arity mismatch, variable rebinding and similar.
struct SemanticError : Error {
    using Error::Error;
};

// State cap or deadline hit. Means "ran out of resources", never "false".
struct ResourceError : Error {
    using Error::Error;
};

// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

// A guess-and-verify construction failed its verification or did not converge.
struct VerificationError : Error {
    using Error::Error;
};

} // namespace fibra
