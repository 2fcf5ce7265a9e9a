#pragma once

#include "gradekit/rubric.hpp"

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

/**
 * @file progress_log.hpp
 * @brief The grading progress log: prompt codes and free texts per
 *        (gradee, question) cell. It never stores points; grades are always
 *        recomputed from the rubric, so rubric edits between sessions
 *        re-price everything already graded.
 *
 * On disk the log is a CSV with one row per cell
 *
 *     gradee_identifier,question,applied_codes,personalized_message,issue_title,issue_body,status
 *
 * where applied_codes are joined with ';' and status is "graded" or
 * "ungraded". The overall step uses the question name "general". A JSON
 * side file `<log>.meta.json` records creation time, rubric path and mode.
 * Every write replaces the file atomically.
 */

namespace gradekit {

enum class CellStatus { ungraded, graded };

struct CellKey {
    std::string gradee;
    std::string question;

    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellRecord {
    std::vector<std::string> applied_codes;
    std::optional<std::string> personalized_message;
    std::optional<std::string> issue_title;
    std::optional<std::string> issue_body;
    CellStatus status = CellStatus::ungraded;

    /// True when the cell carries no codes, texts, or grade.
    bool empty() const;

    friend bool operator==(const CellRecord&, const CellRecord&) = default;
};

struct LogMeta {
    std::string created_at;
    std::string rubric_path;
    GradingMode mode = GradingMode::negative;
    // Cell a resumed session starts at instead of the first pending one. Set
    // when adding the overall step creates pending cells ahead of the cell
    // being graded; cleared once that cell is committed.
    std::optional<CellKey> resume_at;

    friend bool operator==(const LogMeta&, const LogMeta&) = default;
};

/// ISO-8601 UTC timestamp; honours SOURCE_DATE_EPOCH for reproducible runs.
std::string current_timestamp();

std::filesystem::path meta_path_for(const std::filesystem::path& log_path);

class ProgressLog {
public:
    /// Creates a log with every cell ungraded and persists it.
    static ProgressLog init(std::filesystem::path path, std::vector<std::string> gradees,
                            std::vector<std::string> questions, bool has_general, LogMeta meta);

    /// Loads a log and checks that its axes equal the expected ones (order is
    /// taken from the file). A GENERAL axis is added when the rubric gained
    /// general items since the log was created. Throws MalformedLog or
    /// AxesMismatch.
    static ProgressLog load(std::filesystem::path path, const std::vector<std::string>& gradees,
                            const std::vector<std::string>& questions, bool has_general);

    /// Loads without axis expectations. Throws MalformedLog.
    static ProgressLog read(std::filesystem::path path);

    const std::filesystem::path& path() const { return path_; }
    const LogMeta& meta() const { return meta_; }
    const std::vector<std::string>& gradee_order() const { return gradees_; }
    const std::vector<std::string>& question_order() const { return questions_; }
    bool has_general() const { return has_general_; }

    /// Questions of one gradee in visiting order, "general" last when present.
    std::vector<std::string> scopes() const;

    bool contains(const std::string& gradee, const std::string& question) const;
    /// Throws UnknownCell.
    const CellRecord& cell(const std::string& gradee, const std::string& question) const;

    /// Replaces a cell and marks it graded; persisted before returning.
    void commit_cell(const std::string& gradee, const std::string& question, CellRecord record);

    /// Replaces a cell's contents but keeps its status (used for messages and
    /// issues noted before the codes are entered); persisted before returning.
    void stage_cell(const std::string& gradee, const std::string& question, CellRecord record);

    /// Resets the named cells to empty and ungraded; persisted. Throws
    /// UnknownCell before changing anything if any name is off-axis.
    void clear_cells(const std::vector<std::string>& gradees, const std::vector<std::string>& questions);

    /// First ungraded cell, gradee-major, general last within a gradee.
    std::optional<CellKey> next_pending() const;

    /// Adds the GENERAL cells (used when the first general item is created
    /// mid-session); persisted.
    void add_general_axis();
    void set_resume_point(std::optional<CellKey> key);

    std::size_t cell_count() const { return cells_.size(); }
    std::size_t graded_count() const;

    std::string serialize() const;
    void save() const;

    friend bool operator==(const ProgressLog& a, const ProgressLog& b)
    {
        return a.gradees_ == b.gradees_ && a.questions_ == b.questions_ && a.has_general_ == b.has_general_ &&
               a.cells_ == b.cells_ && a.meta_ == b.meta_;
    }

private:
    ProgressLog() = default;
    CellRecord& mutable_cell(const std::string& gradee, const std::string& question);
    void save_meta() const;

    std::filesystem::path path_;
    LogMeta meta_;
    std::vector<std::string> gradees_;
    std::vector<std::string> questions_;
    bool has_general_ = false;
    std::map<CellKey, CellRecord> cells_;
};

/// Exclusive writer lock: creates `<log>.lock` (holding the acquisition time
/// and pid) and removes it on destruction. Throws LogLocked if it exists.
class LogLock {
public:
    explicit LogLock(const std::filesystem::path& log_path);
    ~LogLock();

    LogLock(const LogLock&) = delete;
    LogLock& operator=(const LogLock&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace gradekit
