#include "gradekit/errors.hpp"
#include "gradekit/outputs.hpp"
#include "gradekit/workspace.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace gradekit;

namespace {

const std::string header = "name,total_points,prompt_code,prompt_message,feedback,points_to_remove\n";

CellRecord graded(std::vector<std::string> codes)
{
    CellRecord r;
    r.applied_codes = std::move(codes);
    r.status = CellStatus::graded;
    return r;
}

} // namespace

TEST_CASE("cell grade arithmetic")
{
    Rubric r = parse_rubric(header + "Q1,10,1a,,,0.75\nQ2,1,x,,,0.5\nQ2,1,y,,,0.75\n", GradingMode::negative);
    auto full = compute_cell_grade(r, "Q1", {});
    CHECK(full.points.str() == "10");
    CHECK(full.warnings.empty());
    CHECK(compute_cell_grade(r, "Q1", {"1a"}).points == *Decimal::parse("9.25"));

    auto below = compute_cell_grade(r, "Q2", {"x", "y"});
    Decimal oracle = *Decimal::parse("1") - *Decimal::parse("0.5") - *Decimal::parse("0.75");
    CHECK(below.points == oracle);
    CHECK(below.points.str() == "-0.25");
    REQUIRE(below.warnings.size() == 1);
    CHECK(below.warnings[0].find("below 0") != std::string::npos);

    Rubric pos = parse_rubric(
        "name,total_points,prompt_code,prompt_message,feedback,points_to_add\nQ1,2,a,,,1.5\nQ1,2,b,,,1\n",
        GradingMode::positive);
    CHECK(compute_cell_grade(pos, "Q1", {}).points == Decimal{});
    auto over = compute_cell_grade(pos, "Q1", {"a", "b"});
    CHECK(over.points.str() == "2.5");
    CHECK(over.warnings.size() == 1);
    CHECK_THROWS_AS(compute_cell_grade(r, "Q1", {"zz"}), UnknownCode);
}

TEST_CASE("grade sheet for a fully graded course")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    Workspace ws(testsupport::example_workspace());
    ProgressLog log = ws.open_log();
    for (const auto& g : testsupport::paper_students()) {
        log.commit_cell(g, "Q1", graded({}));
        log.commit_cell(g, "Q2", graded({}));
    }
    GradeSheet sheet = ws.grade_sheet(log);
    CHECK(sheet.columns == std::vector<std::string>{"student_identifier", "section", "grade_Q1", "grade_Q2",
                                                    "assignment_total", "status", "warnings"});
    for (const auto& row : sheet.rows) {
        CHECK(row[4] == "15");
        CHECK(row[5] == "COMPLETE");
    }
}

TEST_CASE("missing and partial rows")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    std::filesystem::remove("hws/hw01-student_T.Rmd");
    Workspace ws(testsupport::example_workspace());
    ProgressLog log = ws.open_log();
    log.commit_cell("BaronPoisson", "Q1", graded({"1a", "1"}));
    log.commit_cell("BaronPoisson", "Q2", graded({"2a"}));
    log.commit_cell("sergent-gamma", "Q1", graded({}));
    GradeSheet sheet = ws.grade_sheet(log);
    CHECK(sheet.rows[0] == std::vector<std::string>{"BaronPoisson", "A", "8.75", "4", "12.75", "COMPLETE", ""});
    CHECK(sheet.rows[1] == std::vector<std::string>{"sergent-gamma", "A", "10", "", "", "PARTIAL", ""});
    CHECK(sheet.rows[2] ==
          std::vector<std::string>{"student_T", "B", "", "", "", "MISSING_SUBMISSION", "no submission found"});
    auto docs = ws.feedback_documents(log);
    CHECK(docs.size() == 2);
    CHECK_FALSE(docs.count("student_T"));
}

TEST_CASE("general adjustments enter the total")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course(true);
    Workspace ws(testsupport::example_workspace());
    ProgressLog log = ws.open_log();
    log.commit_cell("BaronPoisson", "Q1", graded({}));
    log.commit_cell("BaronPoisson", "Q2", graded({}));
    log.commit_cell("BaronPoisson", "general", graded({"g2"}));
    GradeSheet sheet = ws.grade_sheet(log);
    CHECK(sheet.columns[4] == "grade_general");
    CHECK(sheet.rows[0][4] == "-1");
    CHECK(sheet.rows[0][5] == "14");
}

TEST_CASE("feedback rendering")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course(true);
    Workspace ws(testsupport::example_workspace());
    ProgressLog log = ws.open_log();
    log.commit_cell("BaronPoisson", "Q1", graded({"1a"}));
    log.commit_cell("BaronPoisson", "Q2", graded({"1"}));
    CellRecord overall = graded({"g1"});
    overall.personalized_message =
        "Thank you for your note, Menglin. I am glad you had fun doing the assignment.";
    log.commit_cell("BaronPoisson", "general", overall);
    std::string text = render_feedback("BaronPoisson", log, ws.rubric());
    CHECK(text == "# Feedback for BaronPoisson\n"
                  "\n## Q1 — 9.25/10\n"
                  "\n- Use inline R code instead of typing numbers by hand.\n"
                  "\n## Q2 — 4.5/5\n"
                  "\n- Please adhere to the Tidyverse style guide, as discussed in Lecture 1.\n"
                  "\n## Overall\n"
                  "\n- Great job on this assignment!\n"
                  "\n*Thank you for your note, Menglin. I am glad you had fun doing the assignment.*\n");

    log.commit_cell("sergent-gamma", "Q1", graded({}));
    log.commit_cell("sergent-gamma", "Q2", graded({}));
    CHECK(render_feedback("sergent-gamma", log, ws.rubric()) ==
          "# Feedback for sergent-gamma\n\n## Q1 — 10/10\n\n## Q2 — 5/5\n");
    CHECK(render_feedback("student_T", log, ws.rubric()) ==
          "# Feedback for student_T\n\n## Q1 — (not graded)\n\n## Q2 — (not graded)\n");
    CHECK_THROWS_AS(render_feedback("ghost", log, ws.rubric()), UnknownGradee);
}

TEST_CASE("a rubric without questions cannot drive a session")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    testsupport::write_text("rubric.csv", rubric_template() + testsupport::style_guide_row);
    CHECK_THROWS_AS(Workspace(testsupport::example_workspace()), ValidationError);
}

TEST_CASE("team members share grades and one feedback file")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course(false, true);
    Workspace ws(testsupport::example_workspace(true));
    ProgressLog log = ws.open_log();
    CHECK(log.gradee_order() == std::vector<std::string>{"team1", "team2"});
    log.commit_cell("team1", "Q1", graded({"1b"}));
    log.commit_cell("team1", "Q2", graded({}));
    ws.finalize(log);
    GradeSheet sheet = ws.grade_sheet(log);
    std::vector<std::string> a(sheet.rows[0].begin() + 3, sheet.rows[0].end());
    std::vector<std::string> b(sheet.rows[1].begin() + 3, sheet.rows[1].end());
    CHECK(a == b);
    CHECK(a[0] == "8");
    CHECK(std::filesystem::exists("fb/hw01-team1-feedback.md"));
    CHECK(std::filesystem::exists("fb/hw01-team2-feedback.md"));
    CHECK(testsupport::snapshot_tree("fb").size() == 2);
}

TEST_CASE("finalize rewrites outputs after a regrade")
{
    testsupport::ScratchDir dir;
    testsupport::write_example_course();
    Workspace ws(testsupport::example_workspace());
    ProgressLog log = ws.open_log();
    log.commit_cell("student_T", "Q2", graded({"2a"}));
    ws.finalize(log);
    CHECK(testsupport::snapshot_tree("fb").size() == 3);
    std::string before = testsupport::read_text("fb/hw01-student_T-feedback.md");
    log.commit_cell("student_T", "Q2", graded({}));
    ws.finalize(log);
    std::string after = testsupport::read_text("fb/hw01-student_T-feedback.md");
    CHECK(before != after);
    CHECK(after.find("## Q2 — 5/5") != std::string::npos);
}
