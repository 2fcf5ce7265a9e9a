#include "gradekit/terminal.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sys/wait.h>

namespace gradekit {

namespace {

bool read_line(std::istream& in, std::string& line)
{
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

// "\n" typed at the prompt stands for a line break.
std::string unescape_newlines(const std::string& text)
{
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == 'n') {
            out.push_back('\n');
            ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::optional<std::string> ask(std::istream& in, std::ostream& out, const std::string& question)
{
    out << question << std::flush;
    std::string line;
    if (!read_line(in, line)) {
        return std::nullopt;
    }
    return line;
}

void print_prompt(const Session& session, std::ostream& out)
{
    const CellKey& key = *session.current();
    const auto& log = session.log();
    out << "\n== " << key.gradee << " | " << key.question << " (graded " << log.graded_count() << "/"
        << log.cell_count() << ") ==\n";
    for (const auto& item : session.visible_items()) {
        out << "  " << format_prompt_item(item, session.rubric().mode()) << "\n";
    }
    if (auto msg = session.pending_message()) {
        out << "  personalized message: " << *msg << "\n";
    }
    out << "Prompt code(s), - = none, p = personalized message, r = new rubric item, ";
    if (session.config().github_issues) {
        out << "i = note issue, ";
    }
    out << "s = skip, q = quit\n> " << std::flush;
}

// Collects the fields of a new rubric item; nullopt on end of input.
std::optional<RubricItem> ask_rubric_item(const Session& session, std::istream& in, std::ostream& out)
{
    const std::string& question = session.current()->question;
    auto scope = ask(in, out, "Applies to (question name, all_questions, general) [" + question + "]: ");
    if (!scope) {
        return std::nullopt;
    }
    auto code = ask(in, out, "Prompt code: ");
    if (!code) {
        return std::nullopt;
    }
    auto message = ask(in, out, "Prompt message: ");
    if (!message) {
        return std::nullopt;
    }
    auto feedback = ask(in, out, "Feedback: ");
    if (!feedback) {
        return std::nullopt;
    }
    auto points = ask(in, out, std::string(points_column(session.rubric().mode())) + ": ");
    if (!points) {
        return std::nullopt;
    }
    RubricItem item;
    item.applicability = Applicability::from_name(scope->empty() ? question : *scope);
    item.prompt_code = *code;
    item.prompt_message = *message;
    item.feedback = unescape_newlines(*feedback);
    auto value = Decimal::parse(*points);
    if (!value) {
        throw InputError(*points, "points '" + *points + "' is not a decimal number (max 4 decimals)");
    }
    item.points = *value;
    return item;
}

} // namespace

std::string platform_open_command()
{
#if defined(__APPLE__)
    return "open";
#else
    return "xdg-open";
#endif
}

std::string shell_quote(const std::string& text)
{
    std::string out = "'";
    for (char c : text) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('\'');
    return out;
}

void run_effect(const Session& session, const Effect& effect, std::ostream& out)
{
    switch (effect.kind) {
    case Effect::Kind::finalize:
        session.workspace().finalize(session.log());
        out << "Grade sheet written to " << session.workspace().config().grade_sheet.string() << "\n";
        return;
    case Effect::Kind::open_submission:
    case Effect::Kind::close_submission:
        break;
    }
    const bool open = effect.kind == Effect::Kind::open_submission;
    const auto& hook = open ? session.config().open_hook : session.config().close_hook;
    if (!hook || hook->empty()) {
        if (!open) {
            out << "Done with " << effect.gradee << "; close " << effect.path << " if it is still open.\n";
        }
        return;
    }
    std::string command = *hook + " " + shell_quote(effect.path);
    int rc = std::system(command.c_str());
    if (rc != 0) {
        out << "warning: '" << command << "' failed (status "
            << (rc != -1 && WIFEXITED(rc) ? WEXITSTATUS(rc) : rc) << "); continuing\n";
    }
}

void run_terminal(Session& session, std::istream& in, std::ostream& out)
{
    for (const auto& gradee : session.excluded_missing()) {
        out << "Missing submission, skipped: " << gradee << " (" << session.workspace().submission_path(gradee)
            << ")\n";
    }
    for (const auto& effect : session.start_effects()) {
        run_effect(session, effect, out);
    }

    while (!session.finished()) {
        print_prompt(session, out);
        std::string line;
        Action action = action::Quit{};
        if (read_line(in, line)) {
            try {
                action = parse_input(line, session.visible_codes(), session.config().github_issues);
            } catch (const InputError& e) {
                out << e.what() << "\n";
                continue;
            }
        } else {
            out << "\n";
        }

        try {
            if (auto* msg = std::get_if<action::PersonalizedMessage>(&action)) {
                auto text = ask(in, out, "Personalized message (\\n for a line break): ");
                if (!text) {
                    action = action::Quit{};
                } else {
                    msg->text = unescape_newlines(*text);
                }
            } else if (auto* add = std::get_if<action::NewRubricItem>(&action)) {
                auto item = ask_rubric_item(session, in, out);
                if (!item) {
                    action = action::Quit{};
                } else {
                    add->item = std::move(*item);
                }
            } else if (auto* issue = std::get_if<action::NoteIssue>(&action)) {
                auto title = ask(in, out, "Issue title: ");
                auto body = title ? ask(in, out, "Issue body (\\n for a line break): ") : std::nullopt;
                if (!body) {
                    action = action::Quit{};
                } else {
                    issue->title = *title;
                    issue->body = unescape_newlines(*body);
                }
            }
            for (const auto& effect : session.apply(action)) {
                run_effect(session, effect, out);
            }
        } catch (const InputError& e) {
            out << e.what() << "\n";
        } catch (const ValidationError& e) {
            out << describe(e) << "\n";
        } catch (const UnknownQuestion& e) {
            out << e.what() << "\n";
        }
    }
}

} // namespace gradekit
