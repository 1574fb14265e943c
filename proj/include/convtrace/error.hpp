#pragma once

#include <stdexcept>
#include <string>

namespace convtrace {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read, written, or fully decoded.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input decodes but is in a layout we do not handle (bit depth, channels).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Malformed text input: manifests, feature CSVs, spec files, model files.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input violates a documented precondition (duplicates, inconsistent sizes, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Image or plane too small for the requested operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The weighted normal equations carry no information (e.g. a constant plane).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// CT extraction failed for every channel of an image.
class ExtractionError : public Error {
public:
    using Error::Error;
};

/// Bad command-line token (unknown attack, classifier, mode).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace convtrace
