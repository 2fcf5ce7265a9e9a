#pragma once

#include "gradekit/decimal.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

/**
 * @file rubric.hpp
 * @brief Rubric items, their validation, and the rubric CSV format.
 *
 * A rubric file has exactly six columns:
 *
 *     name,total_points,prompt_code,prompt_message,feedback,points_to_remove
 *
 * (`points_to_add` instead of `points_to_remove` for positive grading). The
 * `name` column is "all_questions", "general" (both case-insensitive), or the
 * name of a question.
 */

namespace gradekit {

enum class GradingMode { negative, positive };

std::string_view to_string(GradingMode mode);
std::optional<GradingMode> parse_grading_mode(std::string_view text);

/// Name of the points column for a grading direction.
std::string_view points_column(GradingMode mode);

/// Scope name used for the overall (GENERAL) step in logs and selectors.
inline constexpr std::string_view general_scope = "general";
inline constexpr std::string_view all_questions_scope = "all_questions";

/// Single-letter grader commands; rubric prompt codes may not collide with them.
inline constexpr std::string_view reserved_tokens = "prisq";

bool is_reserved_token(std::string_view token);

/// Typed alone at a prompt, commits the cell with no items applied.
inline constexpr std::string_view no_codes_token = "-";

/// True when `token` is usable as a prompt code (non-empty, no whitespace,
/// commas, or semicolons, and not a reserved token or "-").
bool is_valid_prompt_code(std::string_view token);

bool is_general_name(std::string_view name);

class Applicability {
public:
    enum class Kind { question, all_questions, general };

    static Applicability question(std::string name) { return {Kind::question, std::move(name)}; }
    static Applicability all_questions() { return {Kind::all_questions, {}}; }
    static Applicability general() { return {Kind::general, {}}; }

    /// "all_questions" / "general" (any case) or a question name.
    static Applicability from_name(std::string_view name);

    Kind kind() const { return kind_; }
    const std::string& question_name() const { return question_; }
    bool is_question() const { return kind_ == Kind::question; }

    /// Text for the rubric `name` column.
    std::string name() const;

    friend bool operator==(const Applicability&, const Applicability&) = default;

private:
    Applicability(Kind kind, std::string question) : kind_(kind), question_(std::move(question)) {}

    Kind kind_ = Kind::question;
    std::string question_;
};

struct RubricItem {
    Applicability applicability = Applicability::all_questions();
    std::optional<Decimal> total_points; // only meaningful for question-scoped items
    std::string prompt_code;
    std::string prompt_message;
    std::string feedback;
    Decimal points; // non-negative magnitude; direction comes from GradingMode

    friend bool operator==(const RubricItem&, const RubricItem&) = default;
};

class Rubric {
public:
    Rubric(std::vector<RubricItem> items, GradingMode mode);

    const std::vector<RubricItem>& items() const { return items_; }
    GradingMode mode() const { return mode_; }

    /// Question names in first-appearance order.
    const std::vector<std::string>& questions() const { return questions_; }
    bool has_question(std::string_view name) const;
    bool has_general() const;

    /// Maximum score of a question. Throws UnknownQuestion.
    Decimal total_points(std::string_view question) const;

    /// Items offered at a prompt: question items then ALL_QUESTIONS items for
    /// a question, GENERAL items for `general_scope`. Throws UnknownQuestion.
    std::vector<RubricItem> items_for_scope(std::string_view scope) const;

    /// Looks up a code among the items visible in `scope`.
    const RubricItem* find(std::string_view scope, std::string_view code) const;

    friend bool operator==(const Rubric& a, const Rubric& b)
    {
        return a.mode_ == b.mode_ && a.items_ == b.items_;
    }

private:
    std::vector<RubricItem> items_;
    GradingMode mode_;
    std::vector<std::string> questions_;
};

/// Grading direction implied by the header's points column, if recognizable.
std::optional<GradingMode> detect_grading_mode(std::string_view csv_text);

/// Parses and validates a rubric. Throws MalformedTable or ValidationError;
/// never returns a partially valid rubric.
Rubric parse_rubric(std::string_view csv_text, GradingMode mode, const std::string& source = "rubric");

/// Header-only rubric file for the given direction.
std::string rubric_template(GradingMode mode = GradingMode::negative);

std::string serialize_rubric(const Rubric& rubric);

/// Returns a new rubric with `item` appended. Throws ValidationError.
Rubric add_item(const Rubric& rubric, RubricItem item);

/// As above, then atomically rewrites the rubric file at `path`.
Rubric add_item(const Rubric& rubric, RubricItem item, const std::filesystem::path& path);

Rubric load_rubric(const std::filesystem::path& path, std::optional<GradingMode> mode);

} // namespace gradekit
