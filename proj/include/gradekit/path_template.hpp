#pragma once

#include "gradekit/roster.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace gradekit {

/// A path pattern learned from one example: every occurrence of the example
/// identifier in the example path becomes a placeholder.
class PathTemplate {
public:
    struct Placeholder {
        friend bool operator==(Placeholder, Placeholder) { return true; }
    };
    using Segment = std::variant<std::string, Placeholder>;

    /// Marks every non-overlapping occurrence, left to right. Throws
    /// IdentifierNotInPath when there is none.
    static PathTemplate compile(std::string example_identifier, std::string example_path);

    const std::string& example_identifier() const { return example_identifier_; }
    const std::string& example_path() const { return example_path_; }
    const std::vector<Segment>& segments() const { return segments_; }
    std::size_t placeholder_count() const;

    std::string instantiate(const std::string& identifier) const;

private:
    std::string example_identifier_;
    std::string example_path_;
    std::vector<Segment> segments_;
};

/// Resolves one path per gradee. Throws PathCollision when two gradees share
/// a path, and PathEscapesRoot when a resolved path leaves the directory
/// that precedes the first placeholder (e.g. an identifier containing "..").
std::map<std::string, std::string> resolve_all(const PathTemplate& tmpl, const std::vector<Gradee>& gradees);

struct Presence {
    std::vector<std::string> present;
    std::vector<std::string> missing;
};

/// Splits gradees by whether their path exists; directories count as present.
/// Order follows `order`.
Presence check_presence(const std::map<std::string, std::string>& paths, const std::vector<std::string>& order,
                        const std::filesystem::path& root = {});

} // namespace gradekit
