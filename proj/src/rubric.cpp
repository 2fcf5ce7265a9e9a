#include "gradekit/rubric.hpp"

#include "gradekit/atomic_file.hpp"
#include "gradekit/csv.hpp"
#include "gradekit/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

namespace gradekit {

namespace {

constexpr std::array<std::string_view, 5> fixed_columns = {
    "name", "total_points", "prompt_code", "prompt_message", "feedback",
};

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool has_outer_space(std::string_view s)
{
    return !s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                          std::isspace(static_cast<unsigned char>(s.back())));
}

std::size_t row_of(std::size_t index)
{
    return index + 2;
}

// Checks every invariant of an item list; rows are numbered as CSV records.
ValidationReport validate_items(const std::vector<RubricItem>& items)
{
    ValidationReport report;
    std::map<std::string, Decimal> totals;
    std::map<std::string, std::size_t> first_total_row;
    // code -> scopes it was seen in ("" marks all_questions)
    std::map<std::string, std::set<std::string>> question_codes;
    std::set<std::string> general_codes;

    for (std::size_t i = 0; i < items.size(); ++i) {
        const RubricItem& item = items[i];
        const std::size_t row = row_of(i);
        const auto& app = item.applicability;

        if (app.is_question()) {
            if (app.question_name().empty()) {
                report.push_back({row, "name is empty"});
            } else if (has_outer_space(app.question_name())) {
                report.push_back({row, "question name '" + app.question_name() +
                                           "' has leading or trailing whitespace"});
            }
        }

        const std::string& code = item.prompt_code;
        bool code_ok = true;
        if (code.empty()) {
            report.push_back({row, "prompt_code is empty"});
            code_ok = false;
        } else if (is_reserved_token(code)) {
            report.push_back({row, "prompt_code '" + code + "' collides with reserved command '" + lower(code) + "'"});
            code_ok = false;
        } else if (!is_valid_prompt_code(code)) {
            report.push_back({row, "prompt_code '" + code + "' contains whitespace, ',' or ';', or is '-'"});
            code_ok = false;
        }

        if (item.points < Decimal{}) {
            report.push_back({row, "points must not be negative"});
        }

        if (app.is_question()) {
            if (!item.total_points) {
                report.push_back({row, "total_points is required for question '" + app.question_name() + "'"});
            } else if (*item.total_points < Decimal{}) {
                report.push_back({row, "total_points must not be negative"});
            } else {
                auto [it, inserted] = totals.emplace(app.question_name(), *item.total_points);
                if (inserted) {
                    first_total_row[app.question_name()] = row;
                } else if (it->second != *item.total_points) {
                    report.push_back({row, "inconsistent total_points for '" + app.question_name() + "': " +
                                               item.total_points->str() + " here, " + it->second.str() +
                                               " at row " + std::to_string(first_total_row[app.question_name()])});
                }
            }
        }

        if (!code_ok) {
            continue;
        }
        switch (app.kind()) {
        case Applicability::Kind::general:
            if (!general_codes.insert(code).second) {
                report.push_back({row, "duplicate prompt_code '" + code + "' among general items"});
            }
            break;
        case Applicability::Kind::all_questions: {
            auto& scopes = question_codes[code];
            if (!scopes.empty()) {
                std::string where = scopes.count("") ? std::string("all_questions items")
                                                     : "question '" + *scopes.begin() + "'";
                report.push_back({row, "duplicate prompt_code '" + code + "': also used by " + where});
            }
            scopes.insert("");
            break;
        }
        case Applicability::Kind::question: {
            auto& scopes = question_codes[code];
            if (scopes.count("")) {
                report.push_back({row, "duplicate prompt_code '" + code + "': also used by all_questions items"});
            } else if (scopes.count(app.question_name())) {
                report.push_back({row, "duplicate prompt_code '" + code + "' in question '" + app.question_name() + "'"});
            }
            scopes.insert(app.question_name());
            break;
        }
        }
    }

    // Items scoped to all questions or to the overall step are accepted on
    // their own; a grading session additionally needs a question (see
    // Workspace).
    if (items.empty()) {
        report.push_back({0, "rubric has no items, so no question-scoped items"});
    }
    return report;
}

} // namespace

std::string_view to_string(GradingMode mode)
{
    return mode == GradingMode::negative ? "negative" : "positive";
}

std::optional<GradingMode> parse_grading_mode(std::string_view text)
{
    std::string t = lower(text);
    if (t == "negative") {
        return GradingMode::negative;
    }
    if (t == "positive") {
        return GradingMode::positive;
    }
    return std::nullopt;
}

std::string_view points_column(GradingMode mode)
{
    return mode == GradingMode::negative ? "points_to_remove" : "points_to_add";
}

bool is_reserved_token(std::string_view token)
{
    return token.size() == 1 &&
           reserved_tokens.find(static_cast<char>(std::tolower(static_cast<unsigned char>(token[0])))) !=
               std::string_view::npos;
}

bool is_valid_prompt_code(std::string_view token)
{
    if (token.empty() || is_reserved_token(token) || token == no_codes_token) {
        return false;
    }
    return std::none_of(token.begin(), token.end(), [](unsigned char c) {
        return std::isspace(c) || c == ',' || c == ';';
    });
}

bool is_general_name(std::string_view name)
{
    return lower(name) == general_scope;
}

Applicability Applicability::from_name(std::string_view name)
{
    std::string l = lower(name);
    if (l == all_questions_scope) {
        return all_questions();
    }
    if (l == general_scope) {
        return general();
    }
    return question(std::string(name));
}

std::string Applicability::name() const
{
    switch (kind_) {
    case Kind::all_questions:
        return std::string(all_questions_scope);
    case Kind::general:
        return std::string(general_scope);
    case Kind::question:
        break;
    }
    return question_;
}

Rubric::Rubric(std::vector<RubricItem> items, GradingMode mode) : items_(std::move(items)), mode_(mode)
{
    for (auto& item : items_) {
        if (!item.applicability.is_question()) {
            item.total_points.reset();
        }
    }
    ValidationReport report = validate_items(items_);
    if (!report.empty()) {
        throw ValidationError("rubric", std::move(report));
    }
    for (const auto& item : items_) {
        if (item.applicability.is_question() &&
            std::find(questions_.begin(), questions_.end(), item.applicability.question_name()) == questions_.end()) {
            questions_.push_back(item.applicability.question_name());
        }
    }
}

bool Rubric::has_question(std::string_view name) const
{
    return std::find(questions_.begin(), questions_.end(), name) != questions_.end();
}

bool Rubric::has_general() const
{
    return std::any_of(items_.begin(), items_.end(), [](const RubricItem& it) {
        return it.applicability.kind() == Applicability::Kind::general;
    });
}

Decimal Rubric::total_points(std::string_view question) const
{
    for (const auto& item : items_) {
        if (item.applicability.is_question() && item.applicability.question_name() == question) {
            return *item.total_points;
        }
    }
    throw UnknownQuestion(std::string(question));
}

std::vector<RubricItem> Rubric::items_for_scope(std::string_view scope) const
{
    std::vector<RubricItem> out;
    if (is_general_name(scope)) {
        for (const auto& item : items_) {
            if (item.applicability.kind() == Applicability::Kind::general) {
                out.push_back(item);
            }
        }
        return out;
    }
    if (!has_question(scope)) {
        throw UnknownQuestion(std::string(scope));
    }
    for (const auto& item : items_) {
        if (item.applicability.is_question() && item.applicability.question_name() == scope) {
            out.push_back(item);
        }
    }
    for (const auto& item : items_) {
        if (item.applicability.kind() == Applicability::Kind::all_questions) {
            out.push_back(item);
        }
    }
    return out;
}

const RubricItem* Rubric::find(std::string_view scope, std::string_view code) const
{
    const bool general = is_general_name(scope);
    for (const auto& item : items_) {
        if (item.prompt_code != code) {
            continue;
        }
        const auto& app = item.applicability;
        if (general ? app.kind() == Applicability::Kind::general
                    : (app.kind() == Applicability::Kind::all_questions ||
                       (app.is_question() && app.question_name() == scope))) {
            return &item;
        }
    }
    return nullptr;
}

std::optional<GradingMode> detect_grading_mode(std::string_view csv_text)
{
    csv::Table table = csv::parse(csv_text, "rubric");
    bool remove = table.column(points_column(GradingMode::negative)) != csv::Table::npos;
    bool add = table.column(points_column(GradingMode::positive)) != csv::Table::npos;
    if (remove == add) {
        return std::nullopt;
    }
    return remove ? GradingMode::negative : GradingMode::positive;
}

Rubric parse_rubric(std::string_view csv_text, GradingMode mode, const std::string& source)
{
    csv::Table table = csv::parse(csv_text, source);
    ValidationReport report;

    std::array<std::size_t, 6> col{};
    bool columns_ok = true;
    for (std::size_t i = 0; i < fixed_columns.size(); ++i) {
        col[i] = table.column(fixed_columns[i]);
        if (col[i] == csv::Table::npos) {
            report.push_back({1, "missing column '" + std::string(fixed_columns[i]) + "'"});
            columns_ok = false;
        }
    }
    const std::string_view wanted = points_column(mode);
    const GradingMode other_mode = mode == GradingMode::negative ? GradingMode::positive : GradingMode::negative;
    col[5] = table.column(wanted);
    if (col[5] == csv::Table::npos) {
        if (table.column(points_column(other_mode)) != csv::Table::npos) {
            report.push_back({1, "points column '" + std::string(points_column(other_mode)) + "' does not match " +
                                     std::string(to_string(mode)) + " grading (expected '" + std::string(wanted) +
                                     "')"});
        } else {
            report.push_back({1, "missing column '" + std::string(wanted) + "'"});
        }
        columns_ok = false;
    }
    std::set<std::string> seen;
    for (const auto& h : table.header) {
        if (!seen.insert(h).second) {
            report.push_back({1, "duplicate column '" + h + "'"});
            columns_ok = false;
        } else if (std::find(fixed_columns.begin(), fixed_columns.end(), h) == fixed_columns.end() &&
                   h != points_column(GradingMode::negative) && h != points_column(GradingMode::positive)) {
            report.push_back({1, "unexpected column '" + h + "'"});
            columns_ok = false;
        }
    }
    if (!columns_ok) {
        throw ValidationError(source, std::move(report));
    }

    std::vector<RubricItem> items;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t rec = table.record_numbers[r];
        RubricItem item;
        item.applicability = Applicability::from_name(row[col[0]]);
        if (item.applicability.is_question()) {
            const std::string& tp = row[col[1]];
            if (tp.empty()) {
                // reported by item validation below
            } else if (auto d = Decimal::parse(tp)) {
                item.total_points = d;
            } else {
                report.push_back({rec, "total_points '" + tp + "' is not a decimal number (max 4 decimals)"});
                item.total_points = Decimal{};
            }
        }
        item.prompt_code = row[col[2]];
        item.prompt_message = row[col[3]];
        item.feedback = row[col[4]];
        const std::string& pts = row[col[5]];
        if (auto d = Decimal::parse(pts)) {
            item.points = *d;
        } else {
            report.push_back({rec, std::string(wanted) + " '" + pts + "' is not a decimal number (max 4 decimals)"});
        }
        items.push_back(std::move(item));
    }

    for (auto issue : validate_items(items)) {
        if (issue.row > 0) {
            issue.row = table.record_numbers[issue.row - 2];
        }
        report.push_back(std::move(issue));
    }
    if (!report.empty()) {
        std::stable_sort(report.begin(), report.end(),
                         [](const ValidationIssue& a, const ValidationIssue& b) { return a.row < b.row; });
        throw ValidationError(source, std::move(report));
    }
    return Rubric(std::move(items), mode);
}

std::string rubric_template(GradingMode mode)
{
    csv::Record header(fixed_columns.begin(), fixed_columns.end());
    header.emplace_back(points_column(mode));
    return csv::format_record(header);
}

std::string serialize_rubric(const Rubric& rubric)
{
    std::string out = rubric_template(rubric.mode());
    for (const auto& item : rubric.items()) {
        out += csv::format_record({
            item.applicability.name(),
            item.total_points ? item.total_points->str() : std::string(),
            item.prompt_code,
            item.prompt_message,
            item.feedback,
            item.points.str(),
        });
    }
    return out;
}

Rubric add_item(const Rubric& rubric, RubricItem item)
{
    std::vector<RubricItem> items = rubric.items();
    items.push_back(std::move(item));
    return Rubric(std::move(items), rubric.mode());
}

Rubric add_item(const Rubric& rubric, RubricItem item, const std::filesystem::path& path)
{
    Rubric updated = add_item(rubric, std::move(item));
    write_file_atomically(path, serialize_rubric(updated));
    return updated;
}

Rubric load_rubric(const std::filesystem::path& path, std::optional<GradingMode> mode)
{
    std::string text = read_file(path);
    GradingMode resolved = GradingMode::negative;
    if (mode) {
        resolved = *mode;
    } else if (auto detected = detect_grading_mode(text)) {
        resolved = *detected;
    }
    return parse_rubric(text, resolved, path.string());
}

} // namespace gradekit
