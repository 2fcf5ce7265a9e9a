#include "gradekit/path_template.hpp"

#include "gradekit/errors.hpp"

#include <algorithm>

namespace fs = std::filesystem;

namespace gradekit {

PathTemplate PathTemplate::compile(std::string example_identifier, std::string example_path)
{
    if (example_identifier.empty()) {
        throw Error("example identifier is empty");
    }
    if (example_path.empty()) {
        throw Error("example path is empty");
    }
    PathTemplate t;
    std::size_t pos = 0;
    for (;;) {
        std::size_t hit = example_path.find(example_identifier, pos);
        if (hit == std::string::npos) {
            break;
        }
        if (hit > pos) {
            t.segments_.emplace_back(example_path.substr(pos, hit - pos));
        }
        t.segments_.emplace_back(Placeholder{});
        pos = hit + example_identifier.size();
    }
    if (t.segments_.empty() || pos == 0) {
        throw IdentifierNotInPath(example_identifier, example_path);
    }
    if (pos < example_path.size()) {
        t.segments_.emplace_back(example_path.substr(pos));
    }
    t.example_identifier_ = std::move(example_identifier);
    t.example_path_ = std::move(example_path);
    return t;
}

std::size_t PathTemplate::placeholder_count() const
{
    return static_cast<std::size_t>(std::count_if(segments_.begin(), segments_.end(), [](const Segment& s) {
        return std::holds_alternative<Placeholder>(s);
    }));
}

std::string PathTemplate::instantiate(const std::string& identifier) const
{
    std::string out;
    for (const auto& seg : segments_) {
        if (const auto* lit = std::get_if<std::string>(&seg)) {
            out += *lit;
        } else {
            out += identifier;
        }
    }
    return out;
}

namespace {

// Directory that precedes the first placeholder; every resolved path must stay
// beneath it.
fs::path anchor_directory(const PathTemplate& tmpl)
{
    const auto& segs = tmpl.segments();
    const auto* lit = segs.empty() ? nullptr : std::get_if<std::string>(&segs.front());
    if (lit == nullptr) {
        return {};
    }
    auto slash = lit->find_last_of('/');
    if (slash == std::string::npos) {
        return {};
    }
    return fs::path(lit->substr(0, slash + 1)).lexically_normal();
}

bool stays_under(const fs::path& path, const fs::path& anchor)
{
    fs::path normal = path.lexically_normal();
    auto it = normal.begin();
    for (const auto& part : anchor) {
        if (part.empty() || part == ".") {
            continue;
        }
        if (it == normal.end() || *it != part) {
            return false;
        }
        ++it;
    }
    return it == normal.end() || *it != "..";
}

} // namespace

std::map<std::string, std::string> resolve_all(const PathTemplate& tmpl, const std::vector<Gradee>& gradees)
{
    const fs::path anchor = anchor_directory(tmpl);
    std::map<std::string, std::string> out;
    std::map<std::string, std::string> owner; // normalized path -> gradee
    for (const auto& g : gradees) {
        std::string path = tmpl.instantiate(g.identifier);
        if (!stays_under(path, anchor)) {
            throw PathEscapesRoot(g.identifier, path);
        }
        std::string key = fs::path(path).lexically_normal().generic_string();
        while (key.size() > 1 && key.back() == '/') {
            key.pop_back();
        }
        auto [it, inserted] = owner.emplace(std::move(key), g.identifier);
        if (!inserted) {
            throw PathCollision(it->second, g.identifier, path);
        }
        out.emplace(g.identifier, std::move(path));
    }
    return out;
}

Presence check_presence(const std::map<std::string, std::string>& paths, const std::vector<std::string>& order,
                        const fs::path& root)
{
    Presence result;
    for (const auto& id : order) {
        auto it = paths.find(id);
        if (it == paths.end()) {
            continue;
        }
        fs::path p(it->second);
        if (!root.empty() && p.is_relative()) {
            p = root / p;
        }
        std::error_code ec;
        if (fs::exists(p, ec)) {
            result.present.push_back(id);
        } else {
            result.missing.push_back(id);
        }
    }
    return result;
}

} // namespace gradekit
