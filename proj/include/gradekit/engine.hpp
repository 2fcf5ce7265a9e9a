#pragma once

#include "gradekit/errors.hpp"
#include "gradekit/progress_log.hpp"
#include "gradekit/rubric.hpp"
#include "gradekit/workspace.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

/**
 * @file engine.hpp
 * @brief The grading state machine.
 *
 * A Session walks the pending (gradee, question) cells of the progress log in
 * roster order, offers the rubric items visible for the current cell, and
 * turns grader actions into log updates. Every action is persisted before
 * apply() returns, so a session can be quit at any point and resumed later
 * with the same outcome as an uninterrupted one.
 */

namespace gradekit {

struct SessionConfig {
    WorkspaceConfig workspace;
    bool github_issues = false;
    std::optional<std::vector<std::string>> students;  // gradee identifiers
    std::optional<std::vector<std::string>> questions; // question names, "general" for the overall step
    std::optional<std::string> open_hook;
    std::optional<std::string> close_hook;
};

namespace action {

struct ApplyCodes {
    std::vector<std::string> codes;
};
struct PersonalizedMessage {
    std::string text;
};
struct NewRubricItem {
    RubricItem item;
};
struct NoteIssue {
    std::string title;
    std::string body;
};
struct Skip {};
struct Quit {};

} // namespace action

using Action = std::variant<action::ApplyCodes, action::PersonalizedMessage, action::NewRubricItem, action::NoteIssue,
                            action::Skip, action::Quit>;

/// Rejected grader input; the grader is asked again.
class InputError : public Error {
public:
    InputError(std::string token, const std::string& what) : Error(what), token_(std::move(token)) {}
    const std::string& token() const { return token_; }

private:
    std::string token_;
};

/// Maps one line of grader input to an action. Reserved letters
/// (case-insensitive) select p/r/i/s/q; anything else is a list of prompt
/// codes separated by commas or whitespace. Payloads of p, r and i are left
/// empty for the caller to collect.
Action parse_input(std::string_view raw, const std::vector<std::string>& visible_codes, bool github_issues);

struct Effect {
    enum class Kind { open_submission, close_submission, finalize };

    Kind kind;
    std::string gradee;
    std::string path;

    friend bool operator==(const Effect&, const Effect&) = default;
};

/// "[code] message (-0.75)" in negative mode, "(+0.75)" in positive mode.
std::string format_prompt_item(const RubricItem& item, GradingMode mode);

class Session {
public:
    /// Loads inputs, opens or creates the log, takes the writer lock and
    /// positions at the first pending cell in scope. Throws AllGraded when
    /// nothing in scope is pending.
    explicit Session(SessionConfig config);

    /// Effects to run right after start (opening the first submission).
    std::vector<Effect> start_effects() const;

    /// Processes one action and returns the side effects the caller must run.
    std::vector<Effect> apply(const Action& action);

    bool finished() const { return finished_; }
    const std::optional<CellKey>& current() const { return current_; }
    std::vector<RubricItem> visible_items() const;
    std::vector<std::string> visible_codes() const;
    std::optional<std::string> pending_message() const;

    const SessionConfig& config() const { return config_; }
    const Workspace& workspace() const { return workspace_; }
    const Rubric& rubric() const { return workspace_.rubric(); }
    const ProgressLog& log() const { return log_; }

    /// In-scope gradees left out because their submission is missing.
    const std::vector<std::string>& excluded_missing() const { return excluded_missing_; }

    std::size_t pending_in_scope() const;

private:
    std::optional<CellKey> next_in_scope() const;
    bool in_scope(const CellKey& key) const;
    std::vector<Effect> advance();

    SessionConfig config_;
    Workspace workspace_;
    std::unique_ptr<LogLock> lock_;
    ProgressLog log_;
    std::set<std::string> students_;
    std::set<std::string> questions_;
    std::vector<std::string> excluded_missing_;
    std::set<CellKey> skipped_;
    std::optional<CellKey> current_;
    bool finished_ = false;
};

} // namespace gradekit
