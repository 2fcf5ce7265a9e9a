// gradekit: interactive, rubric-driven grading from the terminal.

#include "gradekit/api_server.hpp"
#include "gradekit/atomic_file.hpp"
#include "gradekit/engine.hpp"
#include "gradekit/errors.hpp"
#include "gradekit/repo.hpp"
#include "gradekit/terminal.hpp"
#include "gradekit/workspace.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace gradekit;

namespace {

struct CommonOptions {
    std::string rubric;
    std::string roster;
    std::string example_id;
    std::string example_sub;
    std::string example_feedback;
    std::string log;
    std::string grades;
    std::string mode;
    bool team = false;
};

struct GradingOptions {
    std::vector<std::string> students;
    std::vector<std::string> questions;
    bool github_issues = false;
    std::string open_hook;
    std::string close_hook;
    bool no_open = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_grades)
{
    cmd->add_option("--rubric", o.rubric, "Rubric CSV")->required();
    cmd->add_option("--roster", o.roster, "Class roster CSV")->required();
    cmd->add_option("--example-id", o.example_id, "One student (or team) identifier from the roster")->required();
    cmd->add_option("--example-sub", o.example_sub, "That gradee's submission path")->required();
    cmd->add_option("--example-feedback", o.example_feedback, "That gradee's feedback file path")->required();
    cmd->add_option("--log", o.log, "Grading progress log (created if absent)")->required();
    auto* grades = cmd->add_option("--grades", o.grades, "Final grade sheet CSV to write");
    if (needs_grades) {
        grades->required();
    }
    cmd->add_option("--mode", o.mode, "negative or positive (default: from the rubric's points column)")
        ->check(CLI::IsMember({"negative", "positive"}));
}

void add_hooks(CLI::App* cmd, GradingOptions& g)
{
    cmd->add_option("--open-hook", g.open_hook, "Command that opens a submission (default: " +
                                                    platform_open_command() + ")");
    cmd->add_option("--close-hook", g.close_hook, "Command that closes a submission");
    cmd->add_flag("--no-open", g.no_open, "Do not open submissions automatically");
}

void add_subsets(CLI::App* cmd, GradingOptions& g)
{
    cmd->add_option("--students", g.students, "Only these student (or team) identifiers")->delimiter(',');
    cmd->add_option("--questions", g.questions, "Only these questions (\"general\" for the overall step)")
        ->delimiter(',');
    cmd->add_flag("--github-issues", g.github_issues, "Offer the 'i' command to note repository issues");
}

WorkspaceConfig workspace_config(const CommonOptions& o)
{
    WorkspaceConfig w;
    w.rubric = o.rubric;
    w.roster = o.roster;
    w.log = o.log;
    w.grade_sheet = o.grades;
    w.example_id = o.example_id;
    w.example_submission = o.example_sub;
    w.example_feedback = o.example_feedback;
    w.team_mode = o.team;
    if (!o.mode.empty()) {
        w.mode = parse_grading_mode(o.mode);
    }
    return w;
}

SessionConfig session_config(const CommonOptions& o, const GradingOptions& g)
{
    SessionConfig c;
    c.workspace = workspace_config(o);
    c.github_issues = g.github_issues;
    if (!g.students.empty()) {
        c.students = g.students;
    }
    if (!g.questions.empty()) {
        c.questions = g.questions;
    }
    if (!g.no_open) {
        c.open_hook = g.open_hook.empty() ? platform_open_command() : g.open_hook;
    }
    if (!g.close_hook.empty()) {
        c.close_hook = g.close_hook;
    }
    return c;
}

int grade(const SessionConfig& config)
{
    try {
        Session session(config);
        run_terminal(session, std::cin, std::cout);
    } catch (const AllGraded& e) {
        std::cout << e.what() << "; regenerating outputs.\n";
        Workspace workspace(config.workspace);
        ProgressLog log = workspace.open_log();
        workspace.finalize(log);
        std::cout << "Grade sheet written to " << config.workspace.grade_sheet.string() << "\n";
    }
    return 0;
}

int regrade(const SessionConfig& config)
{
    {
        Workspace workspace(config.workspace);
        LogLock lock(config.workspace.log);
        if (!fs::exists(config.workspace.log)) {
            throw Error("no progress log at '" + config.workspace.log.string() + "'; nothing to regrade");
        }
        ProgressLog log = workspace.open_log();
        std::vector<std::string> gradees = config.students.value_or(log.gradee_order());
        std::vector<std::string> questions = config.questions.value_or(log.scopes());
        for (auto& q : questions) {
            if (is_general_name(q)) {
                q = std::string(general_scope);
            }
        }
        log.clear_cells(gradees, questions);
        std::cout << "Cleared " << gradees.size() * questions.size() << " cell(s) for regrading.\n";
    }
    return grade(config);
}

int finalize(const CommonOptions& o)
{
    Workspace workspace(workspace_config(o));
    if (!fs::exists(o.log)) {
        throw Error("no progress log at '" + o.log + "'");
    }
    ProgressLog log = ProgressLog::load(o.log, workspace.gradee_ids(), workspace.rubric().questions(),
                                        workspace.rubric().has_general());
    workspace.finalize(log);
    for (const auto& g : workspace.missing()) {
        std::cout << "Missing submission: " << g << "\n";
    }
    std::cout << "Grade sheet written to " << o.grades << "\n";
    return 0;
}

struct PushOptions {
    bool plan_only = false;
    std::string repo_template;
    std::string commit_message = "Add grading feedback";
    std::string token_env;
    std::string git_base = repo::HostingOptions{}.git_base;
    std::string api_base = repo::HostingOptions{}.api_base;
};

int push(const CommonOptions& o, const PushOptions& p)
{
    Workspace workspace(workspace_config(o));
    ProgressLog log = ProgressLog::load(o.log, workspace.gradee_ids(), workspace.rubric().questions(),
                                        workspace.rubric().has_general());
    PathTemplate repo_template = PathTemplate::compile(o.example_id, p.repo_template);

    std::map<std::string, std::string> feedback;
    for (const auto& [gradee, path] : workspace.feedback_paths()) {
        if (!workspace.is_missing(gradee)) {
            feedback.emplace(gradee, path);
        }
    }
    repo::PushPlan plan = repo::plan_push(log, feedback, repo_template, p.commit_message);
    std::cout << "Plan: " << plan.push_count() << " feedback push(es), " << plan.issue_count() << " issue(s)\n";
    for (const auto& op : plan.operations) {
        std::cout << "  " << repo::describe(op) << "\n";
    }
    for (const auto& w : plan.warnings) {
        std::cout << "warning: " << w << "\n";
    }
    if (p.plan_only) {
        return 0;
    }

    std::string env_name = p.token_env;
    if (env_name.empty()) {
        const char* override_name = std::getenv("GRADEKIT_TOKEN_ENV");
        env_name = override_name != nullptr && *override_name != '\0' ? override_name : "GITHUB_TOKEN";
    }
    const char* token = std::getenv(env_name.c_str());
    repo::HostingOptions hosting;
    hosting.git_base = p.git_base;
    hosting.api_base = p.api_base;
    hosting.token = token != nullptr ? token : "";
    if (hosting.token.empty()) {
        std::cout << "warning: environment variable " << env_name << " is not set; using unauthenticated access\n";
    }
    repo::HostingTransport transport(hosting);
    repo::ExecutionReport report = repo::execute(plan, transport);
    for (const auto& r : report.results) {
        std::cout << (r.ok ? "ok     " : "FAILED ") << repo::describe(r.operation) << ": " << r.detail << "\n";
    }
    std::cout << report.changes() << " change(s), " << report.failures() << " failure(s)\n";
    return report.failures() == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rubric-driven grading assistant"};
    app.require_subcommand(1);

    CommonOptions common;
    GradingOptions grading;

    auto* grade_cmd = app.add_subcommand("grade", "Grade every student on every question");
    add_common(grade_cmd, common, true);
    add_hooks(grade_cmd, grading);

    auto* advanced_cmd = app.add_subcommand("grade-advanced", "Grade selected students/questions, note issues");
    add_common(advanced_cmd, common, true);
    add_hooks(advanced_cmd, grading);
    add_subsets(advanced_cmd, grading);

    auto* team_cmd = app.add_subcommand("grade-team", "Grade team submissions (roster needs team_identifier)");
    add_common(team_cmd, common, true);
    add_hooks(team_cmd, grading);
    add_subsets(team_cmd, grading);

    auto* regrade_cmd = app.add_subcommand("regrade", "Clear and grade again selected students/questions");
    add_common(regrade_cmd, common, true);
    add_hooks(regrade_cmd, grading);
    add_subsets(regrade_cmd, grading);
    regrade_cmd->add_flag("--team", common.team, "Team grading");

    std::string template_out;
    std::string template_mode = "negative";
    bool template_force = false;
    auto* template_cmd = app.add_subcommand("template", "Write an empty rubric with the required columns");
    template_cmd->add_option("--out", template_out, "Output path")->required();
    template_cmd->add_option("--mode", template_mode, "negative or positive")
        ->check(CLI::IsMember({"negative", "positive"}));
    template_cmd->add_flag("--force", template_force, "Overwrite an existing file");

    auto* finalize_cmd = app.add_subcommand("finalize", "Regenerate grade sheet and feedback from the log");
    add_common(finalize_cmd, common, true);
    finalize_cmd->add_flag("--team", common.team, "Team grading");

    PushOptions push_options;
    auto* push_cmd = app.add_subcommand("push", "Push feedback files and create noted issues");
    add_common(push_cmd, common, false);
    push_cmd->add_flag("--team", common.team, "Team grading");
    push_cmd->add_flag("--plan-only", push_options.plan_only, "Print the plan and stop");
    push_cmd->add_option("--repo-template", push_options.repo_template,
                         "Repository of the example gradee, e.g. org/hw01-BaronPoisson")
        ->required();
    push_cmd->add_option("--commit-message", push_options.commit_message, "Commit message")->capture_default_str();
    push_cmd->add_option("--token-env", push_options.token_env,
                         "Environment variable holding the access token (default: $GRADEKIT_TOKEN_ENV or "
                         "GITHUB_TOKEN)");
    push_cmd->add_option("--git-base", push_options.git_base, "Clone URL prefix")->capture_default_str();
    push_cmd->add_option("--api-base", push_options.api_base, "REST API base URL")->capture_default_str();

    ServerOptions server_options;
    std::string static_dir;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the session over a local HTTP API");
    add_common(serve_cmd, common, true);
    add_subsets(serve_cmd, grading);
    serve_cmd->add_flag("--team", common.team, "Team grading");
    serve_cmd->add_option("--open-hook", grading.open_hook, "Command that opens a submission");
    serve_cmd->add_option("--close-hook", grading.close_hook, "Command that closes a submission");
    serve_cmd->add_option("--host", server_options.host, "Bind address")->capture_default_str();
    serve_cmd->add_option("--port", server_options.port, "Port (0 picks a free one)")->capture_default_str();
    serve_cmd->add_flag("--allow-remote", server_options.allow_remote, "Allow binding to a non-loopback address");
    serve_cmd->add_option("--static-dir", static_dir, "Directory with the web console assets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*template_cmd) {
            if (fs::exists(template_out) && !template_force) {
                std::cerr << "error: " << template_out << " exists (use --force to overwrite)\n";
                return 1;
            }
            write_file_atomically(template_out, rubric_template(*parse_grading_mode(template_mode)));
            std::cout << "Rubric template written to " << template_out << "\n";
            return 0;
        }
        if (*grade_cmd || *advanced_cmd) {
            return grade(session_config(common, grading));
        }
        if (*team_cmd) {
            common.team = true;
            return grade(session_config(common, grading));
        }
        if (*regrade_cmd) {
            return regrade(session_config(common, grading));
        }
        if (*finalize_cmd) {
            return finalize(common);
        }
        if (*push_cmd) {
            return push(common, push_options);
        }
        if (*serve_cmd) {
            grading.no_open = grading.open_hook.empty();
            SessionConfig config = session_config(common, grading);
            server_options.static_dir = static_dir;
            Session session(config);
            ApiServer server(session, std::cout);
            int port = server.bind(server_options);
            std::cout << "Serving on http://" << server_options.host << ":" << port << "/\n" << std::flush;
            server.run();
            return 0;
        }
    } catch (const AllGraded& e) {
        std::cerr << e.what() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << describe(e) << "\n";
        return 1;
    }
    return 0;
}
