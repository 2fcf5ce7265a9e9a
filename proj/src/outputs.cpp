#include "gradekit/outputs.hpp"

#include "gradekit/atomic_file.hpp"
#include "gradekit/csv.hpp"
#include "gradekit/errors.hpp"

#include <algorithm>

namespace gradekit {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

// Emits `text` as a markdown bullet, indenting continuation lines.
void append_bullet(std::string& out, const std::string& text)
{
    out += "- ";
    for (char c : text) {
        out += c;
        if (c == '\n') {
            out += "  ";
        }
    }
    out += '\n';
}

void append_message(std::string& out, const std::string& message)
{
    std::size_t pos = 0;
    while (pos <= message.size()) {
        std::size_t nl = message.find('\n', pos);
        std::string line = message.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        if (!line.empty()) {
            out += "*" + line + "*\n";
        } else {
            out += "\n";
        }
        if (nl == std::string::npos) {
            break;
        }
        pos = nl + 1;
    }
}

const RubricItem& lookup(const Rubric& rubric, const std::string& scope, const std::string& code)
{
    const RubricItem* item = rubric.find(scope, code);
    if (item == nullptr) {
        throw UnknownCode(code, scope);
    }
    return *item;
}

} // namespace

CellGrade compute_cell_grade(const Rubric& rubric, const std::string& question, const std::vector<std::string>& codes)
{
    const Decimal total = rubric.total_points(question);
    Decimal applied;
    for (const auto& code : codes) {
        applied += lookup(rubric, question, code).points;
    }
    CellGrade grade;
    grade.points = rubric.mode() == GradingMode::negative ? total - applied : applied;
    if (grade.points < Decimal{}) {
        grade.warnings.push_back(question + ": grade " + grade.points.str() + " is below 0");
    } else if (grade.points > total) {
        grade.warnings.push_back(question + ": grade " + grade.points.str() + " exceeds total " + total.str());
    }
    return grade;
}

Decimal general_adjustment(const Rubric& rubric, const std::vector<std::string>& codes)
{
    const std::string scope(general_scope);
    Decimal sum;
    for (const auto& code : codes) {
        sum += lookup(rubric, scope, code).points;
    }
    return rubric.mode() == GradingMode::negative ? -sum : sum;
}

std::string GradeSheet::to_csv() const
{
    return csv::format_table(columns, rows);
}

GradeSheet build_grade_sheet(const Roster& roster, const std::vector<Gradee>& gradees, const ProgressLog& log,
                             const Rubric& rubric, const std::set<std::string>& missing)
{
    const auto& questions = rubric.questions();
    if (log.question_order() != questions) {
        throw AxesMismatch("progress log questions do not match the rubric");
    }
    if (rubric.has_general() != log.has_general()) {
        throw AxesMismatch("progress log and rubric disagree on general items");
    }
    const bool general = rubric.has_general();

    GradeSheet sheet;
    sheet.columns = roster.columns();
    for (const auto& q : questions) {
        sheet.columns.push_back("grade_" + q);
    }
    if (general) {
        sheet.columns.emplace_back("grade_general");
    }
    sheet.columns.emplace_back("assignment_total");
    sheet.columns.emplace_back("status");
    sheet.columns.emplace_back("warnings");

    std::vector<std::vector<std::string>> computed(roster.size());
    for (const auto& g : gradees) {
        std::vector<std::string> cols;
        std::vector<std::string> warnings;
        std::string status;
        std::string total_text;

        if (missing.count(g.identifier)) {
            cols.assign(questions.size() + (general ? 1 : 0), "");
            status = status_missing;
            warnings.push_back("no submission found");
        } else {
            Decimal total;
            bool partial = false;
            for (const auto& q : questions) {
                const CellRecord& cell = log.cell(g.identifier, q);
                if (cell.status != CellStatus::graded) {
                    partial = true;
                    cols.emplace_back();
                    continue;
                }
                CellGrade grade = compute_cell_grade(rubric, q, cell.applied_codes);
                total += grade.points;
                cols.push_back(grade.points.str());
                warnings.insert(warnings.end(), grade.warnings.begin(), grade.warnings.end());
            }
            if (general) {
                const CellRecord& cell = log.cell(g.identifier, std::string(general_scope));
                if (cell.status == CellStatus::graded) {
                    Decimal adj = general_adjustment(rubric, cell.applied_codes);
                    total += adj;
                    cols.push_back(adj.str());
                } else {
                    cols.emplace_back();
                    if (!partial) {
                        warnings.emplace_back("general: not graded");
                    }
                }
            }
            status = partial ? status_partial : status_complete;
            if (!partial) {
                total_text = total.str();
            }
        }

        cols.push_back(total_text);
        cols.push_back(status);
        cols.push_back(join(warnings, "; "));
        for (std::size_t row : g.rows) {
            computed[row] = cols;
        }
    }

    for (std::size_t r = 0; r < roster.size(); ++r) {
        if (computed[r].empty()) {
            throw AxesMismatch("roster row " + std::to_string(r + 2) + " belongs to no gradee");
        }
        std::vector<std::string> row = roster.rows()[r];
        row.insert(row.end(), computed[r].begin(), computed[r].end());
        sheet.rows.push_back(std::move(row));
    }
    return sheet;
}

std::string render_feedback(const std::string& gradee, const ProgressLog& log, const Rubric& rubric)
{
    const auto& order = log.gradee_order();
    if (std::find(order.begin(), order.end(), gradee) == order.end()) {
        throw UnknownGradee(gradee);
    }

    std::string out = "# Feedback for " + gradee + "\n";
    for (const auto& q : rubric.questions()) {
        const CellRecord& cell = log.cell(gradee, q);
        if (cell.status != CellStatus::graded) {
            out += "\n## " + q + " — (not graded)\n";
            continue;
        }
        CellGrade grade = compute_cell_grade(rubric, q, cell.applied_codes);
        out += "\n## " + q + " — " + grade.points.str() + "/" + rubric.total_points(q).str() + "\n";
        bool list_started = false;
        for (const auto& code : cell.applied_codes) {
            const RubricItem& item = lookup(rubric, q, code);
            if (item.feedback.empty()) {
                continue;
            }
            if (!list_started) {
                out += "\n";
                list_started = true;
            }
            append_bullet(out, item.feedback);
        }
        if (cell.personalized_message) {
            out += "\n";
            append_message(out, *cell.personalized_message);
        }
    }

    if (log.has_general()) {
        const std::string scope(general_scope);
        const CellRecord& cell = log.cell(gradee, scope);
        std::vector<std::string> texts;
        if (cell.status == CellStatus::graded) {
            for (const auto& code : cell.applied_codes) {
                const RubricItem& item = lookup(rubric, scope, code);
                if (!item.feedback.empty()) {
                    texts.push_back(item.feedback);
                }
            }
        }
        const bool has_message = cell.status == CellStatus::graded && cell.personalized_message;
        if (!texts.empty() || has_message) {
            out += "\n## Overall\n";
            if (!texts.empty()) {
                out += "\n";
                for (const auto& t : texts) {
                    append_bullet(out, t);
                }
            }
            if (has_message) {
                out += "\n";
                append_message(out, *cell.personalized_message);
            }
        }
    }
    return out;
}

std::map<std::string, std::string> write_outputs(const GradeSheet& sheet, const std::filesystem::path& grade_sheet_path,
                                                 const std::map<std::string, std::string>& feedback,
                                                 const PathTemplate& feedback_template)
{
    write_file_atomically(grade_sheet_path, sheet.to_csv());
    std::map<std::string, std::string> written;
    for (const auto& [gradee, text] : feedback) {
        std::string path = feedback_template.instantiate(gradee);
        write_file_atomically(path, text);
        written.emplace(gradee, std::move(path));
    }
    return written;
}

} // namespace gradekit
