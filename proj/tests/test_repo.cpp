#include "gradekit/repo.hpp"
#include "gradekit/workspace.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <thread>

using namespace gradekit;

namespace {

CellRecord graded(std::vector<std::string> codes)
{
    CellRecord r;
    r.applied_codes = std::move(codes);
    r.status = CellStatus::graded;
    return r;
}

struct GradedCourse {
    Workspace ws{testsupport::example_workspace()};
    ProgressLog log = ws.open_log();
    PathTemplate repos = PathTemplate::compile("BaronPoisson", "org/hw01-BaronPoisson");

    GradedCourse()
    {
        for (const auto& g : testsupport::paper_students()) {
            log.commit_cell(g, "Q1", graded({}));
            log.commit_cell(g, "Q2", graded({}));
        }
        ws.finalize(log);
    }
};

// Number of CREATE_ISSUE operations a log should produce, by direct scan.
std::size_t noted_issues(const ProgressLog& log)
{
    std::size_t n = 0;
    for (const auto& g : log.gradee_order()) {
        for (const auto& q : log.scopes()) {
            n += log.cell(g, q).issue_title.has_value() ? 1 : 0;
        }
    }
    return n;
}

int sh(const std::string& command)
{
    return std::system((command + " >/dev/null 2>&1").c_str());
}

} // namespace

TEST_CASE("plan lists one push per gradee and one issue per noted issue")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    GradedCourse c;
    auto plan = repo::plan_push(c.log, c.ws.feedback_paths(), c.repos, "Feedback");
    CHECK(plan.push_count() == 3);
    CHECK(plan.issue_count() == 0);

    CellRecord r = c.log.cell("sergent-gamma", "Q2");
    r.issue_title = "Tidy up your plots";
    r.issue_body = "Axis labels are missing.";
    c.log.commit_cell("sergent-gamma", "Q2", r);
    plan = repo::plan_push(c.log, c.ws.feedback_paths(), c.repos, "Feedback");
    CHECK(plan.push_count() == 3);
    CHECK(plan.issue_count() == noted_issues(c.log));
    CHECK(plan.operations.size() == 4);
    const auto& issue = std::get<repo::CreateIssue>(plan.operations[2]);
    CHECK(issue.repo == "org/hw01-sergent-gamma");
    CHECK(issue.title == "Tidy up your plots");
    const auto& push = std::get<repo::PushFile>(plan.operations[0]);
    CHECK(push.repo == "org/hw01-BaronPoisson");
    CHECK(push.destination == "hw01-BaronPoisson-feedback.md");

    CellRecord untitled = c.log.cell("student_T", "Q1");
    untitled.issue_body = "body only";
    c.log.commit_cell("student_T", "Q1", untitled);
    plan = repo::plan_push(c.log, c.ws.feedback_paths(), c.repos, "Feedback");
    CHECK(plan.issue_count() == 1);
    CHECK(plan.warnings.size() == 1);
}

TEST_CASE("dry run records the plan and touches nothing")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    GradedCourse c;
    CellRecord r = c.log.cell("student_T", "Q1");
    r.issue_title = "t";
    c.log.commit_cell("student_T", "Q1", r);
    auto plan = repo::plan_push(c.log, c.ws.feedback_paths(), c.repos, "Feedback");
    auto before = testsupport::snapshot_tree(".");
    std::size_t processes = repo::io_counters().processes;
    std::size_t requests = repo::io_counters().http_requests;
    repo::DryRunTransport dry;
    auto report = repo::execute(plan, dry);
    CHECK(dry.recorded() == plan.operations);
    CHECK(report.failures() == 0);
    CHECK(report.changes() == 0);
    CHECK(testsupport::snapshot_tree(".") == before);
    CHECK(repo::io_counters().processes == processes);
    CHECK(repo::io_counters().http_requests == requests);
}

TEST_CASE("missing feedback file is reported before anything runs")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    GradedCourse c;
    std::filesystem::remove("fb/hw01-student_T-feedback.md");
    CHECK_THROWS_AS(repo::plan_push(c.log, c.ws.feedback_paths(), c.repos, "Feedback"), MissingFeedbackFile);
}

TEST_CASE("live transport pushes to git remotes and is idempotent")
{
    if (sh("git --version") != 0) {
        MESSAGE("git not available; skipping");
        return;
    }
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    GradedCourse c;
    // Two of three remotes exist; the third is missing on purpose.
    for (const std::string id : {"BaronPoisson", "sergent-gamma"}) {
        std::string bare = "remotes/org/hw01-" + id + ".git";
        REQUIRE(sh("git init -q --bare " + bare) == 0);
        REQUIRE(sh("git clone -q " + bare + " seed-" + id) == 0);
        testsupport::write_text("seed-" + id + "/README.md", "starter\n");
        REQUIRE(sh("cd seed-" + id + " && git add README.md && git -c user.name=t -c user.email=t@x commit -q -m init "
                   "&& git push -q origin HEAD") == 0);
    }
    auto plan = repo::plan_push(c.log, c.ws.feedback_paths(), c.repos, "Add feedback");
    repo::HostingOptions options;
    options.git_base = "file://" + (dir.path() / "remotes").string() + "/";
    repo::HostingTransport live(options);

    auto first = repo::execute(plan, live);
    CHECK(first.failures() == 1);
    CHECK(first.changes() == 2);
    CHECK_FALSE(first.results[2].ok);

    REQUIRE(sh("git clone -q remotes/org/hw01-BaronPoisson.git check") == 0);
    CHECK(testsupport::read_text("check/hw01-BaronPoisson-feedback.md") ==
          testsupport::read_text("fb/hw01-BaronPoisson-feedback.md"));

    auto second = repo::execute(plan, live);
    CHECK(second.changes() == 0);
    CHECK(second.failures() == 1);
}

TEST_CASE("live transport creates issues through the hosting API")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    GradedCourse c;
    CellRecord r = c.log.cell("BaronPoisson", "Q1");
    r.issue_title = "Use inline code";
    r.issue_body = "See Q1.";
    c.log.commit_cell("BaronPoisson", "Q1", r);
    auto plan = repo::plan_push(c.log, c.ws.feedback_paths(), c.repos, "Add feedback");

    httplib::Server mock;
    std::vector<nlohmann::json> received;
    std::string auth;
    mock.Post(R"(/repos/org/([^/]+)/issues)", [&](const httplib::Request& req, httplib::Response& res) {
        received.push_back(nlohmann::json::parse(req.body));
        received.back()["repo"] = req.matches[1].str();
        auth = req.get_header_value("Authorization");
        res.status = 201;
        res.set_content(R"({"number": 1})", "application/json");
    });
    int port = mock.bind_to_any_port("127.0.0.1");
    std::thread t([&] { mock.listen_after_bind(); });
    mock.wait_until_ready();

    repo::HostingOptions options;
    options.api_base = "http://127.0.0.1:" + std::to_string(port);
    options.token = "secret";
    repo::HostingTransport live(options);
    repo::PushPlan issues_only;
    for (const auto& op : plan.operations) {
        if (std::holds_alternative<repo::CreateIssue>(op)) {
            issues_only.operations.push_back(op);
        }
    }
    auto report = repo::execute(issues_only, live);
    mock.stop();
    t.join();
    CHECK(report.failures() == 0);
    REQUIRE(received.size() == 1);
    CHECK(received[0]["title"] == "Use inline code");
    CHECK(received[0]["body"] == "See Q1.");
    CHECK(received[0]["repo"] == "hw01-BaronPoisson");
    CHECK(auth == "Bearer secret");
}
