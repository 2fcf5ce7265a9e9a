#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gradekit {

inline constexpr std::string_view student_id_column = "student_identifier";
inline constexpr std::string_view team_id_column = "team_identifier";

/// Class roster. All columns are kept verbatim so they can be copied into
/// the grade sheet; row order is grading order.
class Roster {
public:
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    const std::string& student_id(std::size_t row) const { return rows_[row][id_col_]; }
    /// Team of a row; only valid when the roster has a team column.
    const std::string& team_id(std::size_t row) const { return rows_[row][team_col_]; }
    bool has_team_column() const { return team_col_ != npos; }

    friend Roster parse_roster(std::string_view csv_text, bool team_mode, const std::string& source);

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
    std::size_t id_col_ = npos;
    std::size_t team_col_ = npos;
};

/// The unit receiving a grade: a student, or a team sharing one submission.
struct Gradee {
    std::string identifier;
    std::vector<std::string> members; // student identifiers, roster order
    std::vector<std::size_t> rows;    // roster row indices of the members

    friend bool operator==(const Gradee&, const Gradee&) = default;
};

/// Throws MalformedTable or ValidationError.
Roster parse_roster(std::string_view csv_text, bool team_mode, const std::string& source = "roster");

Roster load_roster(const std::filesystem::path& path, bool team_mode);

/// Students in roster order, or teams in first-appearance order.
std::vector<Gradee> gradees(const Roster& roster, bool team_mode);

} // namespace gradekit
