#pragma once

#include <stdexcept>
#include <string>

namespace dpsim {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the thin-lens model (e.g. depth <= f).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A requested value cannot be attained by the forward model.
class RangeError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Raised when an RGB image and its depth map disagree in size.
class ShapeMismatchError : public ShapeError {
public:
    using ShapeError::ShapeError;
};

class EmptyMaskError : public Error {
public:
    using Error::Error;
};

class DegenerateFitError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace dpsim
