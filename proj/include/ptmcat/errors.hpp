#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptmcat {

// Coarse failure category; the CLI maps these to exit codes.
enum class ErrorKind { Config, Data, Training };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string name, const std::string& message)
        : std::runtime_error(message), kind_(kind), name_(std::move(name)) {}

    ErrorKind kind() const noexcept { return kind_; }
    // Stable machine-readable identifier, e.g. "HeaderMismatch".
    const std::string& name() const noexcept { return name_; }

private:
    ErrorKind kind_;
    std::string name_;
};

struct FileNotFoundError : Error {
    explicit FileNotFoundError(const std::string& path)
        : Error(ErrorKind::Data, "FileNotFound", "file not found: " + path) {}
};

struct HeaderMismatchError : Error {
    explicit HeaderMismatchError(const std::string& missing_columns)
        : Error(ErrorKind::Data, "HeaderMismatch",
                "header is missing required columns: " + missing_columns) {}
};

struct MalformedRowError : Error {
    MalformedRowError(std::size_t line, const std::string& why)
        : Error(ErrorKind::Data, "MalformedRow",
                "line " + std::to_string(line) + ": " + why) {}
};

struct EmptyDatasetError : Error {
    explicit EmptyDatasetError(const std::string& what_for)
        : Error(ErrorKind::Data, "EmptyDataset", what_for) {}
};

struct EmptyCorpusError : Error {
    EmptyCorpusError() : Error(ErrorKind::Data, "EmptyCorpus", "no documents to fit") {}
};

struct SingleClassError : Error {
    SingleClassError()
        : Error(ErrorKind::Training, "SingleClassCorpus",
                "training requires at least two distinct labels") {}
};

struct DimensionMismatchError : Error {
    explicit DimensionMismatchError(const std::string& detail)
        : Error(ErrorKind::Training, "DimensionMismatch", detail) {}
};

struct LengthMismatchError : Error {
    LengthMismatchError(std::size_t lhs, std::size_t rhs)
        : Error(ErrorKind::Data, "LengthMismatch",
                "sequence lengths differ: " + std::to_string(lhs) + " vs " +
                    std::to_string(rhs)) {}
};

struct TooFewSamplesError : Error {
    explicit TooFewSamplesError(const std::string& detail)
        : Error(ErrorKind::Data, "TooFewSamples", detail) {}
};

struct SchemaError : Error {
    // `field_path` pinpoints the offending field, e.g. "docs[3].macro_ids[0]".
    SchemaError(const std::string& field_path, const std::string& why)
        : Error(ErrorKind::Data, "SchemaError", field_path + ": " + why) {}
};

struct EmptyNameError : Error {
    EmptyNameError() : Error(ErrorKind::Data, "EmptyName", "model name is empty") {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& why)
        : Error(ErrorKind::Config, "ConfigError", why) {}
};

} // namespace ptmcat
