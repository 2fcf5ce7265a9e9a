#pragma once

#include "gradekit/errors.hpp"
#include "gradekit/path_template.hpp"
#include "gradekit/progress_log.hpp"

#include <atomic>
#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace gradekit::repo {

struct PushFile {
    std::string gradee;
    std::string repo;
    std::string local_path;
    std::string destination; // path inside the repository
    std::string commit_message;

    friend bool operator==(const PushFile&, const PushFile&) = default;
};

struct CreateIssue {
    std::string gradee;
    std::string question;
    std::string repo;
    std::string title;
    std::string body;

    friend bool operator==(const CreateIssue&, const CreateIssue&) = default;
};

using Operation = std::variant<PushFile, CreateIssue>;

std::string describe(const Operation& op);

struct PushPlan {
    std::vector<Operation> operations;
    std::vector<std::string> warnings;

    std::size_t push_count() const;
    std::size_t issue_count() const;

    friend bool operator==(const PushPlan&, const PushPlan&) = default;
};

/// One PUSH_FILE per gradee in `feedback_paths` followed by that gradee's
/// noted issues, in log order. Issues without a title are left out with a
/// warning. Throws MissingFeedbackFile when a listed file does not exist.
PushPlan plan_push(const ProgressLog& log, const std::map<std::string, std::string>& feedback_paths,
                   const PathTemplate& repo_template, const std::string& commit_message);

/// Raised by a transport for a single failed operation.
class TransportFailure : public Error {
public:
    using Error::Error;
};

struct Outcome {
    bool changed = false; // a commit was pushed or an issue created
    std::string detail;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual Outcome push_file(const PushFile& op) = 0;
    virtual Outcome create_issue(const CreateIssue& op) = 0;
};

/// Records operations and touches nothing.
class DryRunTransport : public Transport {
public:
    Outcome push_file(const PushFile& op) override;
    Outcome create_issue(const CreateIssue& op) override;

    const std::vector<Operation>& recorded() const { return recorded_; }

private:
    std::vector<Operation> recorded_;
};

struct HostingOptions {
    std::string git_base = "https://github.com/";   // clone URL = git_base + repo + ".git"
    std::string api_base = "https://api.github.com"; // issues: POST {api_base}/repos/{repo}/issues
    std::string token;                               // never written anywhere
};

/// Pushes through the `git` command-line client and creates issues through
/// the hosting service's REST API. A push whose file content is unchanged
/// makes no commit.
class HostingTransport : public Transport {
public:
    explicit HostingTransport(HostingOptions options) : options_(std::move(options)) {}

    Outcome push_file(const PushFile& op) override;
    Outcome create_issue(const CreateIssue& op) override;

private:
    HostingOptions options_;
};

struct OperationResult {
    Operation operation;
    bool ok = false;
    bool changed = false;
    std::string detail;
};

struct ExecutionReport {
    std::vector<OperationResult> results;

    std::size_t failures() const;
    std::size_t changes() const;
};

/// Runs every operation in order; failures are collected, not thrown.
ExecutionReport execute(const PushPlan& plan, Transport& transport);

/// Counts of external side effects performed by HostingTransport.
struct IoCounters {
    std::atomic<std::size_t> processes{0};
    std::atomic<std::size_t> http_requests{0};
};

IoCounters& io_counters();

} // namespace gradekit::repo
