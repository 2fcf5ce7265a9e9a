#pragma once

#include "gradekit/atomic_file.hpp"
#include "gradekit/engine.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unistd.h>
#include <vector>

namespace testsupport {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir; the process chdirs into it for
// the object's lifetime so relative paths in fixtures resolve there.
class ScratchDir {
public:
    ScratchDir()
    {
        std::string pattern = (fs::temp_directory_path() / "gradekit-test-XXXXXX").string();
        if (::mkdtemp(pattern.data()) == nullptr) {
            std::abort();
        }
        path_ = pattern;
        previous_ = fs::current_path();
        fs::current_path(path_);
    }
    ~ScratchDir()
    {
        std::error_code ec;
        fs::current_path(previous_, ec);
        fs::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    fs::path previous_;
};

inline void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const fs::path& path)
{
    return gradekit::read_file(path);
}

// Every regular file below `root` with its bytes, keyed by relative path.
inline std::map<std::string, std::string> snapshot_tree(const fs::path& root)
{
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            files.emplace(fs::relative(entry.path(), root).generic_string(), read_text(entry.path()));
        }
    }
    return files;
}

inline const std::vector<std::string>& paper_students()
{
    static const std::vector<std::string> ids = {"BaronPoisson", "sergent-gamma", "student_T"};
    return ids;
}

inline const char* style_guide_row =
    "all_questions,,1,tidyverse code style,\"Please adhere to the Tidyverse style guide, as discussed in "
    "Lecture 1.\",0.5\n";

// Negative-mode rubric: Q1 (10 points) and Q2 (5 points), one all_questions
// item, optionally a general item.
inline std::string example_rubric(bool with_general)
{
    std::string text = "name,total_points,prompt_code,prompt_message,feedback,points_to_remove\n"
                       "Q1,10,1a,inline code,Use inline R code instead of typing numbers by hand.,0.75\n"
                       "Q1,10,1b,no interpretation,Interpret the slope in context.,2\n"
                       "Q2,5,2a,missing units,Report the units of measurement.,1\n";
    text += style_guide_row;
    if (with_general) {
        text += "general,,g1,great job,Great job on this assignment!,0\n"
                "general,,g2,late,Submitted late.,1\n";
    }
    return text;
}

// Writes roster, rubric and submissions for the three example students into
// the current directory.
inline void write_example_course(bool with_general = false, bool team_mode = false)
{
    if (team_mode) {
        write_text("roster.csv", "student_identifier,team_identifier,section\n"
                                 "BaronPoisson,team1,A\n"
                                 "sergent-gamma,team1,A\n"
                                 "student_T,team2,B\n");
        write_text("hws/hw01-team1.Rmd", "# team1 submission\n");
        write_text("hws/hw01-team2.Rmd", "# team2 submission\n");
    } else {
        write_text("roster.csv", "student_identifier,section\n"
                                 "BaronPoisson,A\n"
                                 "sergent-gamma,A\n"
                                 "student_T,B\n");
        for (const auto& s : paper_students()) {
            write_text("hws/hw01-" + s + ".Rmd", "# submission of " + s + "\n");
        }
    }
    write_text("rubric.csv", example_rubric(with_general));
}

// Workspace over the files written by write_example_course().
inline gradekit::WorkspaceConfig example_workspace(bool team_mode = false)
{
    gradekit::WorkspaceConfig c;
    c.rubric = "rubric.csv";
    c.roster = "roster.csv";
    c.log = "log.csv";
    c.grade_sheet = "grades.csv";
    c.example_id = team_mode ? "team1" : "BaronPoisson";
    c.example_submission = "hws/hw01-" + c.example_id + ".Rmd";
    c.example_feedback = "fb/hw01-" + c.example_id + "-feedback.md";
    c.team_mode = team_mode;
    return c;
}

inline gradekit::SessionConfig example_session(bool team_mode = false)
{
    gradekit::SessionConfig c;
    c.workspace = example_workspace(team_mode);
    return c;
}

} // namespace testsupport
