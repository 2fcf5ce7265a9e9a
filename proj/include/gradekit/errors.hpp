#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradekit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Delimited text that cannot be tokenized (unterminated quote, ragged row, ...).
class MalformedTable : public Error {
public:
    MalformedTable(std::string source, std::size_t record, const std::string& what);

    const std::string& source() const { return source_; }
    std::size_t record() const { return record_; }

private:
    std::string source_;
    std::size_t record_;
};

struct ValidationIssue {
    std::size_t row = 0; // CSV record number (header = 1); 0 for file-level issues
    std::string message;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Semantic violations of a table's contract. Carries every violation found.
class ValidationError : public Error {
public:
    ValidationError(std::string source, ValidationReport report);

    const std::string& source() const { return source_; }
    const ValidationReport& report() const { return report_; }

private:
    std::string source_;
    ValidationReport report_;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

class UnknownQuestion : public Error {
public:
    explicit UnknownQuestion(const std::string& question);
};

class UnknownCode : public Error {
public:
    UnknownCode(const std::string& code, const std::string& question);
};

class UnknownCell : public Error {
public:
    UnknownCell(const std::string& gradee, const std::string& question);
};

class UnknownGradee : public Error {
public:
    explicit UnknownGradee(const std::string& gradee);
};

class IdentifierNotInPath : public Error {
public:
    IdentifierNotInPath(const std::string& identifier, const std::string& path);
};

class PathCollision : public Error {
public:
    PathCollision(std::string first, std::string second, std::string path);

    const std::string& first() const { return first_; }
    const std::string& second() const { return second_; }
    const std::string& path() const { return path_; }

private:
    std::string first_;
    std::string second_;
    std::string path_;
};

class PathEscapesRoot : public Error {
public:
    PathEscapesRoot(const std::string& identifier, const std::string& path);
};

class MalformedLog : public Error {
public:
    using Error::Error;
};

class AxesMismatch : public Error {
public:
    using Error::Error;
};

class LogLocked : public Error {
public:
    using Error::Error;
};

class AllGraded : public Error {
public:
    AllGraded() : Error("nothing left to grade in the selected students and questions") {}
};

class MissingFeedbackFile : public Error {
public:
    MissingFeedbackFile(const std::string& gradee, const std::string& path);
};

/// Renders an error with its validation report (if any), one issue per line.
std::string describe(const std::exception& e);

} // namespace gradekit
