#pragma once

#include <stdexcept>
#include <string>

namespace mcc {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input image or argument outside an operation's domain.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Collinear, coincident or otherwise degenerate point configuration.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

// The minimum enclosing quadrilateral could not be formed.
class FitFailure : public Error {
public:
    using Error::Error;
};

// A patch group that cannot be laid onto the 4x6 grid.
class MalformedGroup : public Error {
public:
    using Error::Error;
};

// Hypothesis with no patch inside the image.
class InvalidHypothesis : public Error {
public:
    using Error::Error;
};

// Bad configuration value or unknown key.
class ConfigError : public Error {
public:
    using Error::Error;
};

// File system or codec failure; message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

// Ground truth and predictions that cannot be paired.
class ScoringError : public Error {
public:
    using Error::Error;
};

}  // namespace mcc
