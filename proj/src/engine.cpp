#include "gradekit/engine.hpp"

#include <algorithm>
#include <cctype>

namespace gradekit {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string> split_tokens(std::string_view raw)
{
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : raw) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                tokens.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) {
        tokens.push_back(std::move(cur));
    }
    return tokens;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

Action parse_input(std::string_view raw, const std::vector<std::string>& visible_codes, bool github_issues)
{
    std::vector<std::string> tokens = split_tokens(raw);
    if (tokens.empty()) {
        throw InputError("", "enter one or more prompt codes, - for none, or p, r, i, s, q");
    }
    if (tokens.size() == 1 && is_reserved_token(tokens.front())) {
        switch (lower(tokens.front())[0]) {
        case 'p':
            return action::PersonalizedMessage{};
        case 'r':
            return action::NewRubricItem{};
        case 'i':
            if (!github_issues) {
                throw InputError(tokens.front(), "issue recording is off; start the session with --github-issues");
            }
            return action::NoteIssue{};
        case 's':
            return action::Skip{};
        default:
            return action::Quit{};
        }
    }
    if (tokens.size() == 1 && tokens.front() == no_codes_token) {
        return action::ApplyCodes{};
    }
    action::ApplyCodes apply;
    for (auto& token : tokens) {
        if (is_reserved_token(token)) {
            throw InputError(token, "command '" + token + "' must be entered on its own");
        }
        if (std::find(visible_codes.begin(), visible_codes.end(), token) == visible_codes.end()) {
            throw InputError(token, "unknown prompt code '" + token + "'");
        }
        if (std::find(apply.codes.begin(), apply.codes.end(), token) != apply.codes.end()) {
            throw InputError(token, "prompt code '" + token + "' entered twice");
        }
        apply.codes.push_back(std::move(token));
    }
    return apply;
}

std::string format_prompt_item(const RubricItem& item, GradingMode mode)
{
    std::string sign = item.points == Decimal{} ? "" : mode == GradingMode::negative ? "-" : "+";
    return "[" + item.prompt_code + "] " + item.prompt_message + " (" + sign + item.points.str() + ")";
}

Session::Session(SessionConfig config)
    : config_(std::move(config)),
      workspace_(config_.workspace),
      lock_(std::make_unique<LogLock>(config_.workspace.log)),
      log_(workspace_.open_log())
{
    if (config_.students) {
        std::vector<std::string> unknown;
        for (const auto& s : *config_.students) {
            const auto& order = log_.gradee_order();
            if (std::find(order.begin(), order.end(), s) == order.end()) {
                unknown.push_back(s);
            }
            students_.insert(s);
        }
        if (!unknown.empty()) {
            std::string list;
            for (const auto& u : unknown) {
                list += (list.empty() ? "'" : ", '") + u + "'";
            }
            throw Error("not in the roster" + std::string(config_.workspace.team_mode ? " (team identifiers)" : "") +
                        ": " + list);
        }
        if (students_.empty()) {
            throw Error("empty student selection");
        }
    }
    if (config_.questions) {
        for (const auto& q : *config_.questions) {
            if (is_general_name(q)) {
                if (!rubric().has_general()) {
                    throw UnknownQuestion(q);
                }
                questions_.insert(std::string(general_scope));
            } else if (!rubric().has_question(q)) {
                throw UnknownQuestion(q);
            } else {
                questions_.insert(q);
            }
        }
        if (questions_.empty()) {
            throw Error("empty question selection");
        }
    }
    for (const auto& g : log_.gradee_order()) {
        if ((students_.empty() || students_.count(g)) && workspace_.is_missing(g)) {
            excluded_missing_.push_back(g);
        }
    }
    const auto& resume = log_.meta().resume_at;
    if (resume && in_scope(*resume) && log_.cell(resume->gradee, resume->question).status == CellStatus::ungraded) {
        current_ = resume;
    } else {
        current_ = next_in_scope();
    }
    if (!current_) {
        throw AllGraded();
    }
}

bool Session::in_scope(const CellKey& key) const
{
    if (!students_.empty() && !students_.count(key.gradee)) {
        return false;
    }
    if (!questions_.empty() && !questions_.count(key.question)) {
        return false;
    }
    return !workspace_.is_missing(key.gradee);
}

std::optional<CellKey> Session::next_in_scope() const
{
    const auto scopes = log_.scopes();
    for (const auto& g : log_.gradee_order()) {
        for (const auto& q : scopes) {
            CellKey key{g, q};
            if (in_scope(key) && !skipped_.count(key) && log_.cell(g, q).status == CellStatus::ungraded) {
                return key;
            }
        }
    }
    return std::nullopt;
}

std::size_t Session::pending_in_scope() const
{
    std::size_t n = 0;
    const auto scopes = log_.scopes();
    for (const auto& g : log_.gradee_order()) {
        for (const auto& q : scopes) {
            CellKey key{g, q};
            if (in_scope(key) && !skipped_.count(key) && log_.cell(g, q).status == CellStatus::ungraded) {
                ++n;
            }
        }
    }
    return n;
}

std::vector<Effect> Session::start_effects() const
{
    if (!current_) {
        return {};
    }
    return {{Effect::Kind::open_submission, current_->gradee, workspace_.submission_path(current_->gradee)}};
}

std::vector<RubricItem> Session::visible_items() const
{
    if (!current_) {
        return {};
    }
    return rubric().items_for_scope(current_->question);
}

std::vector<std::string> Session::visible_codes() const
{
    std::vector<std::string> codes;
    for (const auto& item : visible_items()) {
        codes.push_back(item.prompt_code);
    }
    return codes;
}

std::optional<std::string> Session::pending_message() const
{
    if (!current_) {
        return std::nullopt;
    }
    return log_.cell(current_->gradee, current_->question).personalized_message;
}

std::vector<Effect> Session::advance()
{
    std::vector<Effect> effects;
    const std::string previous = current_ ? current_->gradee : std::string();
    current_ = next_in_scope();
    if (!current_ || current_->gradee != previous) {
        if (!previous.empty()) {
            effects.push_back({Effect::Kind::close_submission, previous, workspace_.submission_path(previous)});
        }
        if (current_) {
            effects.push_back(
                {Effect::Kind::open_submission, current_->gradee, workspace_.submission_path(current_->gradee)});
        }
    }
    if (!current_) {
        finished_ = true;
        effects.push_back({Effect::Kind::finalize, {}, {}});
    }
    return effects;
}

std::vector<Effect> Session::apply(const Action& act)
{
    if (finished_) {
        throw Error("the grading session has ended");
    }
    if (std::holds_alternative<action::Quit>(act)) {
        std::vector<Effect> effects;
        if (current_) {
            effects.push_back(
                {Effect::Kind::close_submission, current_->gradee, workspace_.submission_path(current_->gradee)});
        }
        effects.push_back({Effect::Kind::finalize, {}, {}});
        current_.reset();
        finished_ = true;
        return effects;
    }

    const CellKey key = *current_;
    const CellRecord& cell = log_.cell(key.gradee, key.question);

    return std::visit(
        overloaded{
            [&](const action::ApplyCodes& a) -> std::vector<Effect> {
                const auto visible = visible_codes();
                std::vector<std::string> seen;
                for (const auto& code : a.codes) {
                    if (std::find(visible.begin(), visible.end(), code) == visible.end()) {
                        throw InputError(code, "unknown prompt code '" + code + "'");
                    }
                    if (std::find(seen.begin(), seen.end(), code) != seen.end()) {
                        throw InputError(code, "prompt code '" + code + "' entered twice");
                    }
                    seen.push_back(code);
                }
                CellRecord record = cell;
                record.applied_codes = a.codes;
                log_.commit_cell(key.gradee, key.question, std::move(record));
                return advance();
            },
            [&](const action::PersonalizedMessage& m) -> std::vector<Effect> {
                CellRecord record = cell;
                record.personalized_message = m.text;
                log_.stage_cell(key.gradee, key.question, std::move(record));
                return {};
            },
            [&](const action::NewRubricItem& n) -> std::vector<Effect> {
                RubricItem item = n.item;
                if (item.applicability.is_question()) {
                    const std::string& q = item.applicability.question_name();
                    if (!rubric().has_question(q)) {
                        throw InputError(q, "unknown question '" + q +
                                                "'; new items must target an existing question, all_questions, "
                                                "or general");
                    }
                    if (!item.total_points) {
                        item.total_points = rubric().total_points(q);
                    }
                }
                const bool first_general =
                    item.applicability.kind() == Applicability::Kind::general && !rubric().has_general();
                Rubric updated = add_item(rubric(), std::move(item), config_.workspace.rubric);
                workspace_.set_rubric(std::move(updated));
                if (first_general) {
                    log_.add_general_axis();
                    // The new overall cells of earlier gradees now come before
                    // this one; make a resumed session re-prompt it too.
                    log_.set_resume_point(key);
                }
                return {};
            },
            [&](const action::NoteIssue& i) -> std::vector<Effect> {
                if (!config_.github_issues) {
                    throw InputError("i", "issue recording is off; start the session with --github-issues");
                }
                CellRecord record = cell;
                record.issue_title = i.title;
                record.issue_body = i.body;
                log_.stage_cell(key.gradee, key.question, std::move(record));
                return {};
            },
            [&](const action::Skip&) -> std::vector<Effect> {
                skipped_.insert(key);
                return advance();
            },
            [&](const action::Quit&) -> std::vector<Effect> { return {}; },
        },
        act);
}

} // namespace gradekit
