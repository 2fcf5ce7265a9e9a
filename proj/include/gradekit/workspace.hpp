#pragma once

#include "gradekit/outputs.hpp"
#include "gradekit/path_template.hpp"
#include "gradekit/progress_log.hpp"
#include "gradekit/roster.hpp"
#include "gradekit/rubric.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gradekit {

/// File locations shared by every command.
struct WorkspaceConfig {
    std::filesystem::path rubric;
    std::filesystem::path roster;
    std::filesystem::path log;
    std::filesystem::path grade_sheet;
    std::string example_id;
    std::string example_submission;
    std::string example_feedback;
    bool team_mode = false;
    std::optional<GradingMode> mode; // inferred from the rubric header when unset
};

/// Validated inputs: rubric, roster, gradees and their resolved paths.
class Workspace {
public:
    explicit Workspace(WorkspaceConfig config);

    const WorkspaceConfig& config() const { return config_; }
    const Rubric& rubric() const { return rubric_; }
    void set_rubric(Rubric rubric) { rubric_ = std::move(rubric); }
    const Roster& roster() const { return roster_; }
    const std::vector<Gradee>& gradees() const { return gradees_; }
    std::vector<std::string> gradee_ids() const;
    const Gradee& gradee(const std::string& id) const;

    const PathTemplate& submission_template() const { return submission_template_; }
    const PathTemplate& feedback_template() const { return feedback_template_; }
    const std::string& submission_path(const std::string& gradee) const { return submission_paths_.at(gradee); }
    const std::map<std::string, std::string>& feedback_paths() const { return feedback_paths_; }

    /// Gradees whose submission path does not exist, roster order.
    const std::vector<std::string>& missing() const { return missing_; }
    bool is_missing(const std::string& gradee) const { return missing_set_.count(gradee) > 0; }
    const std::set<std::string>& missing_set() const { return missing_set_; }

    /// Loads the log at config().log, creating it when absent.
    ProgressLog open_log() const;

    GradeSheet grade_sheet(const ProgressLog& log) const;
    std::map<std::string, std::string> feedback_documents(const ProgressLog& log) const;

    /// Regenerates the grade sheet and every feedback file from the log.
    /// Gradees with missing submissions get no feedback file.
    void finalize(const ProgressLog& log) const;

private:
    WorkspaceConfig config_;
    Rubric rubric_;
    Roster roster_;
    std::vector<Gradee> gradees_;
    PathTemplate submission_template_;
    PathTemplate feedback_template_;
    std::map<std::string, std::string> submission_paths_;
    std::map<std::string, std::string> feedback_paths_;
    std::vector<std::string> missing_;
    std::set<std::string> missing_set_;
};

} // namespace gradekit
