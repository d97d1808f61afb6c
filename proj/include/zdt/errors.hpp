#pragma once

#include <stdexcept>
#include <string>

namespace zdt {

// Base class for all library errors. Subclasses exist so callers (and the
// CLI's exit-code mapping) can react to specific failure kinds.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Row-level ingestion failures.
class MalformedRowError : public Error {
public:
    using Error::Error;
};
class RangeError : public Error {
public:
    using Error::Error;
};

// File-level ingestion failures.
class IoError : public Error {
public:
    using Error::Error;
};
class SchemaError : public Error {
public:
    using Error::Error;
};

class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

// Feature / matrix shape failures.
class EmptyMatrixError : public Error {
public:
    using Error::Error;
};
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};
class UnknownNodeError : public Error {
public:
    using Error::Error;
};

// Training and model persistence.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};
class NonFiniteLossError : public Error {
public:
    using Error::Error;
};
class VersionMismatchError : public Error {
public:
    using Error::Error;
};
class ChecksumMismatchError : public Error {
public:
    using Error::Error;
};

// Detection pipeline.
class SchemaMismatchError : public Error {
public:
    using Error::Error;
};
class LabelContaminationError : public Error {
public:
    using Error::Error;
};

// Metrics.
class SingleClassError : public Error {
public:
    using Error::Error;
};
class LengthMismatchError : public Error {
public:
    using Error::Error;
};

// Synthetic generation and configuration.
class UnknownTemplateError : public Error {
public:
    using Error::Error;
};
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace zdt
