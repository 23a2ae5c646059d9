#pragma once

#include <stdexcept>
#include <string>

namespace chartdig {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// The bytes were read but do not form a supported image.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// A precondition on the input data does not hold (blank image, short signal...).
class InputError : public Error {
public:
    using Error::Error;
};

} // namespace chartdig
