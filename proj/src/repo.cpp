#include "gradekit/repo.hpp"

#include "gradekit/atomic_file.hpp"
#include "gradekit/errors.hpp"

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace fs = std::filesystem;

namespace gradekit::repo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct ProcessResult {
    int status = -1;
    std::string output;
};

// Runs argv without a shell, stdout and stderr captured together.
ProcessResult run_process(const std::vector<std::string>& argv, const std::vector<std::string>& extra_env)
{
    ++io_counters().processes;

    int fds[2];
    if (::pipe(fds) != 0) {
        throw TransportFailure(std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    posix_spawn_file_actions_adddup2(&actions, fds[1], 1);
    posix_spawn_file_actions_adddup2(&actions, fds[1], 2);
    posix_spawn_file_actions_addclose(&actions, fds[1]);

    std::vector<char*> args;
    for (const auto& a : argv) {
        args.push_back(const_cast<char*>(a.c_str()));
    }
    args.push_back(nullptr);

    std::vector<std::string> env_storage;
    for (char** e = environ; *e != nullptr; ++e) {
        std::string_view entry(*e);
        std::string_view key = entry.substr(0, entry.find('='));
        bool overridden = std::any_of(extra_env.begin(), extra_env.end(), [&](const std::string& x) {
            return x.size() > key.size() && x.compare(0, key.size(), key) == 0 && x[key.size()] == '=';
        });
        if (!overridden) {
            env_storage.emplace_back(entry);
        }
    }
    env_storage.insert(env_storage.end(), extra_env.begin(), extra_env.end());
    std::vector<char*> env;
    for (auto& e : env_storage) {
        env.push_back(e.data());
    }
    env.push_back(nullptr);

    pid_t pid = 0;
    int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), env.data());
    posix_spawn_file_actions_destroy(&actions);
    ::close(fds[1]);
    if (rc != 0) {
        ::close(fds[0]);
        throw TransportFailure("cannot run " + argv[0] + ": " + std::strerror(rc));
    }

    ProcessResult result;
    char buf[4096];
    for (;;) {
        ssize_t n = ::read(fds[0], buf, sizeof buf);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            break;
        }
        result.output.append(buf, static_cast<std::size_t>(n));
    }
    ::close(fds[0]);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

ProcessResult git(const std::vector<std::string>& args, const std::vector<std::string>& env)
{
    std::vector<std::string> argv = {"git"};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv, env);
}

void git_or_throw(const std::vector<std::string>& args, const std::vector<std::string>& env, const std::string& what)
{
    ProcessResult r = git(args, env);
    if (r.status != 0) {
        std::string out = r.output;
        while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) {
            out.pop_back();
        }
        throw TransportFailure(what + " failed: " + out);
    }
}

std::string base64(const std::string& in)
{
    std::string out(4 * ((in.size() + 2) / 3) + 1, '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            reinterpret_cast<const unsigned char*>(in.data()), static_cast<int>(in.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

class TempDir {
public:
    TempDir()
    {
        std::string pattern = (fs::temp_directory_path() / "gradekit-push-XXXXXX").string();
        if (::mkdtemp(pattern.data()) == nullptr) {
            throw TransportFailure(std::string("mkdtemp: ") + std::strerror(errno));
        }
        path_ = pattern;
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

} // namespace

IoCounters& io_counters()
{
    static IoCounters counters;
    return counters;
}

std::string describe(const Operation& op)
{
    return std::visit(overloaded{
                          [](const PushFile& p) {
                              return "PUSH_FILE " + p.repo + " " + p.local_path + " -> " + p.destination + " (\"" +
                                     p.commit_message + "\")";
                          },
                          [](const CreateIssue& i) {
                              return "CREATE_ISSUE " + i.repo + " \"" + i.title + "\" (" + i.question + ")";
                          },
                      },
                      op);
}

std::size_t PushPlan::push_count() const
{
    return static_cast<std::size_t>(std::count_if(operations.begin(), operations.end(), [](const Operation& op) {
        return std::holds_alternative<PushFile>(op);
    }));
}

std::size_t PushPlan::issue_count() const
{
    return operations.size() - push_count();
}

PushPlan plan_push(const ProgressLog& log, const std::map<std::string, std::string>& feedback_paths,
                   const PathTemplate& repo_template, const std::string& commit_message)
{
    PushPlan plan;
    const auto scopes = log.scopes();
    for (const auto& gradee : log.gradee_order()) {
        const std::string repo = repo_template.instantiate(gradee);
        if (auto it = feedback_paths.find(gradee); it != feedback_paths.end()) {
            std::error_code ec;
            if (!fs::is_regular_file(it->second, ec)) {
                throw MissingFeedbackFile(gradee, it->second);
            }
            plan.operations.emplace_back(
                PushFile{gradee, repo, it->second, fs::path(it->second).filename().string(), commit_message});
        }
        for (const auto& q : scopes) {
            const CellRecord& cell = log.cell(gradee, q);
            if (cell.issue_title) {
                plan.operations.emplace_back(
                    CreateIssue{gradee, q, repo, *cell.issue_title, cell.issue_body.value_or("")});
            } else if (cell.issue_body) {
                plan.warnings.push_back("issue noted for (" + gradee + ", " + q + ") has no title; not created");
            }
        }
    }
    return plan;
}

Outcome DryRunTransport::push_file(const PushFile& op)
{
    recorded_.emplace_back(op);
    return {false, "dry run"};
}

Outcome DryRunTransport::create_issue(const CreateIssue& op)
{
    recorded_.emplace_back(op);
    return {false, "dry run"};
}

Outcome HostingTransport::push_file(const PushFile& op)
{
    std::vector<std::string> env = {"GIT_TERMINAL_PROMPT=0"};
    if (!options_.token.empty() && options_.git_base.rfind("https://", 0) == 0) {
        env.emplace_back("GIT_CONFIG_COUNT=1");
        env.emplace_back("GIT_CONFIG_KEY_0=http.extraHeader");
        env.emplace_back("GIT_CONFIG_VALUE_0=Authorization: Basic " + base64("x-access-token:" + options_.token));
    }

    const std::string content = read_file(op.local_path);
    TempDir tmp;
    const fs::path work = tmp.path() / "repo";
    const std::string url = options_.git_base + op.repo + ".git";
    git_or_throw({"clone", "--quiet", "--depth", "1", url, work.string()}, env, "clone of " + url);

    const fs::path target = work / op.destination;
    std::error_code ec;
    if (fs::is_regular_file(target, ec) && read_file(target) == content) {
        return {false, "unchanged"};
    }
    write_file_atomically(target, content);

    const std::string dir = work.string();
    if (git({"-C", dir, "config", "user.name"}, env).status != 0) {
        git_or_throw({"-C", dir, "config", "user.name", "gradekit"}, env, "git config");
    }
    if (git({"-C", dir, "config", "user.email"}, env).status != 0) {
        git_or_throw({"-C", dir, "config", "user.email", "gradekit@localhost"}, env, "git config");
    }
    git_or_throw({"-C", dir, "add", "--", op.destination}, env, "git add");
    git_or_throw({"-C", dir, "commit", "--quiet", "-m", op.commit_message}, env, "git commit");
    git_or_throw({"-C", dir, "push", "--quiet", "origin", "HEAD"}, env, "push to " + url);
    return {true, "pushed " + op.destination};
}

Outcome HostingTransport::create_issue(const CreateIssue& op)
{
    ++io_counters().http_requests;
    httplib::Client client(options_.api_base);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    httplib::Headers headers = {
        {"Accept", "application/vnd.github+json"},
        {"User-Agent", "gradekit"},
    };
    if (!options_.token.empty()) {
        headers.emplace("Authorization", "Bearer " + options_.token);
    }
    nlohmann::json body = {{"title", op.title}, {"body", op.body}};
    auto res = client.Post("/repos/" + op.repo + "/issues", headers, body.dump(), "application/json");
    if (!res) {
        throw TransportFailure("issue request for " + op.repo + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 201 && res->status != 200) {
        throw TransportFailure("issue request for " + op.repo + " returned HTTP " + std::to_string(res->status));
    }
    std::string detail = "created issue";
    try {
        auto reply = nlohmann::json::parse(res->body);
        if (reply.contains("html_url") && reply["html_url"].is_string()) {
            detail += " " + reply["html_url"].get<std::string>();
        }
    } catch (const nlohmann::json::exception&) {
    }
    return {true, detail};
}

std::size_t ExecutionReport::failures() const
{
    return static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const OperationResult& r) { return !r.ok; }));
}

std::size_t ExecutionReport::changes() const
{
    return static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const OperationResult& r) { return r.changed; }));
}

ExecutionReport execute(const PushPlan& plan, Transport& transport)
{
    ExecutionReport report;
    for (const auto& op : plan.operations) {
        OperationResult result{op, false, false, {}};
        try {
            Outcome outcome = std::visit(overloaded{
                                             [&](const PushFile& p) { return transport.push_file(p); },
                                             [&](const CreateIssue& i) { return transport.create_issue(i); },
                                         },
                                         op);
            result.ok = true;
            result.changed = outcome.changed;
            result.detail = std::move(outcome.detail);
        } catch (const std::exception& e) {
            result.detail = e.what();
        }
        report.results.push_back(std::move(result));
    }
    return report;
}

} // namespace gradekit::repo
