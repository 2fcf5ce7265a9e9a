#pragma once

#include "gradekit/decimal.hpp"
#include "gradekit/path_template.hpp"
#include "gradekit/progress_log.hpp"
#include "gradekit/roster.hpp"
#include "gradekit/rubric.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace gradekit {

struct CellGrade {
    Decimal points;
    std::vector<std::string> warnings;
};

/// Negative mode: total_points minus the applied deductions. Positive mode:
/// the sum of applied additions. Out-of-range results are kept and warned
/// about, never clamped. Throws UnknownQuestion or UnknownCode.
CellGrade compute_cell_grade(const Rubric& rubric, const std::string& question, const std::vector<std::string>& codes);

/// Signed contribution of applied general items to the assignment total.
Decimal general_adjustment(const Rubric& rubric, const std::vector<std::string>& codes);

inline constexpr std::string_view status_complete = "COMPLETE";
inline constexpr std::string_view status_partial = "PARTIAL";
inline constexpr std::string_view status_missing = "MISSING_SUBMISSION";

/// Roster columns verbatim, then grade_<question>..., grade_general (when the
/// rubric has general items), assignment_total, status, warnings.
struct GradeSheet {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

/// One row per roster row; team members receive their team's grades.
/// Throws AxesMismatch when the log does not cover the roster and rubric.
GradeSheet build_grade_sheet(const Roster& roster, const std::vector<Gradee>& gradees, const ProgressLog& log,
                             const Rubric& rubric, const std::set<std::string>& missing);

/// Markdown feedback for one gradee. Throws UnknownGradee.
std::string render_feedback(const std::string& gradee, const ProgressLog& log, const Rubric& rubric);

/// Writes the grade sheet and one feedback file per entry in `feedback`
/// (gradee -> markdown) at the templated path, each replaced atomically.
/// Returns the feedback paths written.
std::map<std::string, std::string> write_outputs(const GradeSheet& sheet, const std::filesystem::path& grade_sheet_path,
                                                 const std::map<std::string, std::string>& feedback,
                                                 const PathTemplate& feedback_template);

} // namespace gradekit
