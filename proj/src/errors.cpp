#include "gradekit/errors.hpp"

#include <sstream>

namespace gradekit {

MalformedTable::MalformedTable(std::string source, std::size_t record, const std::string& what)
    : Error(source + ": record " + std::to_string(record) + ": " + what),
      source_(std::move(source)),
      record_(record)
{
}

namespace {

std::string summarize(const std::string& source, const ValidationReport& report)
{
    std::ostringstream out;
    out << source << ": " << report.size() << " validation issue" << (report.size() == 1 ? "" : "s");
    return out.str();
}

} // namespace

ValidationError::ValidationError(std::string source, ValidationReport report)
    : Error(summarize(source, report)),
      source_(std::move(source)),
      report_(std::move(report))
{
}

UnknownQuestion::UnknownQuestion(const std::string& question)
    : Error("unknown question '" + question + "'")
{
}

UnknownCode::UnknownCode(const std::string& code, const std::string& question)
    : Error("prompt code '" + code + "' is not available for '" + question + "'")
{
}

UnknownCell::UnknownCell(const std::string& gradee, const std::string& question)
    : Error("no progress-log cell for (" + gradee + ", " + question + ")")
{
}

UnknownGradee::UnknownGradee(const std::string& gradee)
    : Error("unknown gradee '" + gradee + "'")
{
}

IdentifierNotInPath::IdentifierNotInPath(const std::string& identifier, const std::string& path)
    : Error("identifier '" + identifier + "' does not occur in example path '" + path + "'")
{
}

PathCollision::PathCollision(std::string first, std::string second, std::string path)
    : Error("gradees '" + first + "' and '" + second + "' both resolve to '" + path + "'"),
      first_(std::move(first)),
      second_(std::move(second)),
      path_(std::move(path))
{
}

PathEscapesRoot::PathEscapesRoot(const std::string& identifier, const std::string& path)
    : Error("path '" + path + "' for identifier '" + identifier + "' escapes the course root")
{
}

MissingFeedbackFile::MissingFeedbackFile(const std::string& gradee, const std::string& path)
    : Error("feedback file for '" + gradee + "' not found at '" + path + "'")
{
}

std::string describe(const std::exception& e)
{
    std::string out = e.what();
    if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
        for (const auto& issue : v->report()) {
            out += "\n  ";
            if (issue.row > 0) {
                out += "row " + std::to_string(issue.row) + ": ";
            }
            out += issue.message;
        }
    }
    return out;
}

} // namespace gradekit
