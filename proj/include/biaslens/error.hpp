#pragma once

#include <stdexcept>
#include <string>

namespace biaslens {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (bad range, invalid id, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Input data could not be parsed (malformed JSONL line, bad model file, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

/// The remote API rejected the supplied credentials.
class CredentialError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace biaslens
