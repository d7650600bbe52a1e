#pragma once

#include <stdexcept>
#include <string>

namespace tissueseg {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two rasters that must share a shape do not.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Input holds no information to threshold (e.g. an empty histogram).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Parameters violate a documented precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

// File or tile source failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace tissueseg
