#include "gradekit/workspace.hpp"

#include "gradekit/errors.hpp"

namespace fs = std::filesystem;

namespace gradekit {

Workspace::Workspace(WorkspaceConfig config)
    : config_(std::move(config)),
      rubric_(load_rubric(config_.rubric, config_.mode)),
      roster_(load_roster(config_.roster, config_.team_mode)),
      gradees_(gradekit::gradees(roster_, config_.team_mode)),
      submission_template_(PathTemplate::compile(config_.example_id, config_.example_submission)),
      feedback_template_(PathTemplate::compile(config_.example_id, config_.example_feedback))
{
    if (config_.log.empty()) {
        throw Error("no progress log path configured");
    }
    if (rubric_.questions().empty()) {
        throw ValidationError(config_.rubric.string(),
                              {{0, "rubric has no question-scoped items, so there is nothing to grade"}});
    }
    bool example_known = false;
    for (const auto& g : gradees_) {
        example_known = example_known || g.identifier == config_.example_id;
    }
    if (!example_known) {
        throw Error("example identifier '" + config_.example_id + "' is not a " +
                    (config_.team_mode ? "team" : "student") + " identifier in the roster");
    }
    submission_paths_ = resolve_all(submission_template_, gradees_);
    feedback_paths_ = resolve_all(feedback_template_, gradees_);
    missing_ = check_presence(submission_paths_, gradee_ids()).missing;
    missing_set_.insert(missing_.begin(), missing_.end());
}

std::vector<std::string> Workspace::gradee_ids() const
{
    std::vector<std::string> ids;
    for (const auto& g : gradees_) {
        ids.push_back(g.identifier);
    }
    return ids;
}

const Gradee& Workspace::gradee(const std::string& id) const
{
    for (const auto& g : gradees_) {
        if (g.identifier == id) {
            return g;
        }
    }
    throw UnknownGradee(id);
}

ProgressLog Workspace::open_log() const
{
    if (fs::exists(config_.log)) {
        return ProgressLog::load(config_.log, gradee_ids(), rubric_.questions(), rubric_.has_general());
    }
    return ProgressLog::init(config_.log, gradee_ids(), rubric_.questions(), rubric_.has_general(),
                             LogMeta{current_timestamp(), config_.rubric.string(), rubric_.mode()});
}

GradeSheet Workspace::grade_sheet(const ProgressLog& log) const
{
    return build_grade_sheet(roster_, gradees_, log, rubric_, missing_set_);
}

std::map<std::string, std::string> Workspace::feedback_documents(const ProgressLog& log) const
{
    std::map<std::string, std::string> docs;
    for (const auto& g : gradees_) {
        if (!is_missing(g.identifier)) {
            docs.emplace(g.identifier, render_feedback(g.identifier, log, rubric_));
        }
    }
    return docs;
}

void Workspace::finalize(const ProgressLog& log) const
{
    if (config_.grade_sheet.empty()) {
        throw Error("no grade sheet path configured");
    }
    write_outputs(grade_sheet(log), config_.grade_sheet, feedback_documents(log), feedback_template_);
}

} // namespace gradekit
