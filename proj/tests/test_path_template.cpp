#include "gradekit/errors.hpp"
#include "gradekit/path_template.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace gradekit;
using Seg = PathTemplate::Segment;

namespace {

// Independent oracle: scan every offset, take non-overlapping matches left to
// right, and emit the pieces between them.
std::vector<Seg> occurrence_scan(const std::string& id, const std::string& path)
{
    std::vector<Seg> out;
    std::string literal;
    std::size_t i = 0;
    while (i < path.size()) {
        bool match = i + id.size() <= path.size();
        for (std::size_t k = 0; match && k < id.size(); ++k) {
            match = path[i + k] == id[k];
        }
        if (match) {
            if (!literal.empty()) {
                out.emplace_back(literal);
                literal.clear();
            }
            out.emplace_back(PathTemplate::Placeholder{});
            i += id.size();
        } else {
            literal.push_back(path[i++]);
        }
    }
    if (!literal.empty()) {
        out.emplace_back(literal);
    }
    return out;
}

std::vector<Gradee> as_gradees(const std::vector<std::string>& ids)
{
    std::vector<Gradee> out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out.push_back({ids[i], {ids[i]}, {i}});
    }
    return out;
}

} // namespace

TEST_CASE("compile the example submission path")
{
    auto t = PathTemplate::compile("BaronPoisson", "hws/hw01-BaronPoisson.Rmd");
    CHECK(t.segments() == std::vector<Seg>{std::string("hws/hw01-"), PathTemplate::Placeholder{}, std::string(".Rmd")});
    CHECK(t.instantiate("sergent-gamma") == "hws/hw01-sergent-gamma.Rmd");
    CHECK(t.instantiate("student_T") == "hws/hw01-student_T.Rmd");
    CHECK(t.instantiate("BaronPoisson") == "hws/hw01-BaronPoisson.Rmd");
}

TEST_CASE("every occurrence of the identifier becomes a placeholder")
{
    auto t = PathTemplate::compile("a", "a/a.txt");
    CHECK(t.segments() == occurrence_scan("a", "a/a.txt"));
    CHECK(t.placeholder_count() == 2);
    CHECK(t.instantiate("zz") == "zz/zz.txt");
    CHECK_THROWS_AS(PathTemplate::compile("Alice", "hws/hw01-Bob.Rmd"), IdentifierNotInPath);
}

TEST_CASE("compile agrees with the occurrence scan on random inputs")
{
    std::mt19937 rng(11);
    const std::string alphabet = "ab/.";
    for (int iter = 0; iter < 500; ++iter) {
        std::string id;
        for (std::size_t k = 1 + rng() % 3; k > 0; --k) {
            id.push_back("ab"[rng() % 2]);
        }
        std::string path;
        for (std::size_t k = rng() % 10; k > 0; --k) {
            path.push_back(alphabet[rng() % alphabet.size()]);
        }
        path.insert(rng() % (path.size() + 1), id);
        auto t = PathTemplate::compile(id, path);
        CHECK(t.segments() == occurrence_scan(id, path));
        CHECK(t.instantiate(id) == path);
    }
}

TEST_CASE("resolve_all yields distinct paths")
{
    auto t = PathTemplate::compile("BaronPoisson", "hws/hw01-BaronPoisson.Rmd");
    auto paths = resolve_all(t, as_gradees(testsupport::paper_students()));
    CHECK(paths == std::map<std::string, std::string>{{"BaronPoisson", "hws/hw01-BaronPoisson.Rmd"},
                                                      {"sergent-gamma", "hws/hw01-sergent-gamma.Rmd"},
                                                      {"student_T", "hws/hw01-student_T.Rmd"}});
    // Pairwise equality oracle.
    for (const auto& [a, pa] : paths) {
        for (const auto& [b, pb] : paths) {
            CHECK((a == b) == (pa == pb));
        }
    }
}

TEST_CASE("resolve_all rejects collisions and escapes")
{
    // "x" and "x/." normalize to the same place.
    auto t = PathTemplate::compile("x", "subs/x");
    CHECK_THROWS_AS(resolve_all(t, as_gradees({"x", "x/."})), PathCollision);
    CHECK_THROWS_AS(resolve_all(t, as_gradees({"x", "../../etc"})), PathEscapesRoot);
}

TEST_CASE("check_presence treats directories as present")
{
    testsupport::ScratchDir dir;
    testsupport::write_text("hws/a.Rmd", "x");
    testsupport::write_text("hws/c/one.R", "1");
    testsupport::write_text("hws/c/two.R", "2");
    std::map<std::string, std::string> paths{{"a", "hws/a.Rmd"}, {"b", "hws/b.Rmd"}, {"c", "hws/c"}};
    auto p = check_presence(paths, {"a", "b", "c"});
    CHECK(p.present == std::vector<std::string>{"a", "c"});
    CHECK(p.missing == std::vector<std::string>{"b"});
}
