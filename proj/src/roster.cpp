#include "gradekit/roster.hpp"

#include "gradekit/atomic_file.hpp"
#include "gradekit/csv.hpp"
#include "gradekit/errors.hpp"

#include <map>
#include <unordered_map>

namespace gradekit {

Roster parse_roster(std::string_view csv_text, bool team_mode, const std::string& source)
{
    csv::Table table = csv::parse(csv_text, source);
    ValidationReport report;

    Roster roster;
    roster.id_col_ = table.column(student_id_column);
    roster.team_col_ = table.column(team_id_column);

    std::map<std::string, int> header_counts;
    for (const auto& h : table.header) {
        if (++header_counts[h] == 2) {
            report.push_back({1, "duplicate column '" + h + "'"});
        }
    }
    if (roster.id_col_ == Roster::npos) {
        report.push_back({1, "missing column '" + std::string(student_id_column) + "'"});
    }
    if (team_mode && roster.team_col_ == Roster::npos) {
        report.push_back({1, "team grading needs a '" + std::string(team_id_column) + "' column"});
    }
    if (!report.empty()) {
        throw ValidationError(source, std::move(report));
    }

    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t rec = table.record_numbers[r];
        const std::string& id = row[roster.id_col_];
        if (id.empty()) {
            report.push_back({rec, "empty student_identifier"});
        } else if (auto [it, inserted] = seen.emplace(id, rec); !inserted) {
            report.push_back({rec, "duplicate student_identifier '" + id + "' (first at row " +
                                       std::to_string(it->second) + ")"});
        }
        if (team_mode && row[roster.team_col_].empty()) {
            report.push_back({rec, "empty team_identifier"});
        }
    }
    if (!report.empty()) {
        throw ValidationError(source, std::move(report));
    }

    roster.columns_ = std::move(table.header);
    roster.rows_ = std::move(table.rows);
    return roster;
}

Roster load_roster(const std::filesystem::path& path, bool team_mode)
{
    return parse_roster(read_file(path), team_mode, path.string());
}

std::vector<Gradee> gradees(const Roster& roster, bool team_mode)
{
    std::vector<Gradee> out;
    if (!team_mode) {
        for (std::size_t r = 0; r < roster.size(); ++r) {
            out.push_back({roster.student_id(r), {roster.student_id(r)}, {r}});
        }
        return out;
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < roster.size(); ++r) {
        const std::string& team = roster.team_id(r);
        auto [it, inserted] = index.emplace(team, out.size());
        if (inserted) {
            out.push_back({team, {}, {}});
        }
        out[it->second].members.push_back(roster.student_id(r));
        out[it->second].rows.push_back(r);
    }
    return out;
}

} // namespace gradekit
