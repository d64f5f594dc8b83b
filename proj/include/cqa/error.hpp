#pragma once

#include <stdexcept>
#include <string>

namespace cqa {

/// Bad input data: malformed records, broken invariants, unknown ids.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A record in a line-delimited file failed to parse or validate.
class RecordError : public DataError {
public:
    RecordError(std::string file, std::size_t line, std::string field, const std::string& what)
        : DataError(file + ":" + std::to_string(line) + ": " +
                    (field.empty() ? std::string() : "field '" + field + "': ") + what),
          file_(std::move(file)), line_(line), field_(std::move(field)) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string file_;
    std::size_t line_;
    std::string field_;
};

/// The scorer could not be reached or timed out. Retrying may succeed.
class ScorerTransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The scorer answered, but the answer is unusable (missing pairs, non-finite
/// scores, undecodable body). Retrying will not help.
class ScorerResponseError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace cqa
