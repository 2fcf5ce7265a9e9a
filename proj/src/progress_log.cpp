#include "gradekit/progress_log.hpp"

#include "gradekit/atomic_file.hpp"
#include "gradekit/csv.hpp"
#include "gradekit/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fcntl.h>
#include <set>
#include <unistd.h>

namespace fs = std::filesystem;

namespace gradekit {

namespace {

const csv::Record log_header = {
    "gradee_identifier", "question", "applied_codes", "personalized_message", "issue_title", "issue_body", "status",
};

std::optional<std::string> non_empty(std::string s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    return s;
}

std::string join_codes(const std::vector<std::string>& codes)
{
    std::string out;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (i > 0) {
            out += ';';
        }
        out += codes[i];
    }
    return out;
}

std::vector<std::string> split_codes(const std::string& joined, const std::string& source, std::size_t rec)
{
    std::vector<std::string> out;
    if (joined.empty()) {
        return out;
    }
    std::size_t pos = 0;
    for (;;) {
        std::size_t semi = joined.find(';', pos);
        std::string code = joined.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
        if (code.empty()) {
            throw MalformedLog(source + ": record " + std::to_string(rec) + ": empty prompt code in applied_codes");
        }
        if (std::find(out.begin(), out.end(), code) != out.end()) {
            throw MalformedLog(source + ": record " + std::to_string(rec) + ": prompt code '" + code +
                               "' applied twice");
        }
        out.push_back(std::move(code));
        if (semi == std::string::npos) {
            break;
        }
        pos = semi + 1;
    }
    return out;
}

void normalize(CellRecord& r)
{
    auto clean = [](std::optional<std::string>& s) {
        if (s && s->empty()) {
            s.reset();
        }
    };
    clean(r.personalized_message);
    clean(r.issue_title);
    clean(r.issue_body);
}

void check_codes(const CellRecord& r, const CellKey& key)
{
    std::set<std::string> seen;
    for (const auto& code : r.applied_codes) {
        if (code.empty() || code.find(';') != std::string::npos) {
            throw Error("prompt code '" + code + "' cannot be stored in the progress log");
        }
        if (!seen.insert(code).second) {
            throw Error("prompt code '" + code + "' applied twice to (" + key.gradee + ", " + key.question + ")");
        }
    }
}

std::string describe_difference(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                                std::string_view what)
{
    std::set<std::string> e(expected.begin(), expected.end());
    std::set<std::string> a(actual.begin(), actual.end());
    std::string out;
    for (const auto& x : e) {
        if (!a.count(x)) {
            out += " new " + std::string(what) + " '" + x + "';";
        }
    }
    for (const auto& x : a) {
        if (!e.count(x)) {
            out += " " + std::string(what) + " '" + x + "' no longer present;";
        }
    }
    return out;
}

} // namespace

bool CellRecord::empty() const
{
    return applied_codes.empty() && !personalized_message && !issue_title && !issue_body &&
           status == CellStatus::ungraded;
}

std::string current_timestamp()
{
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path meta_path_for(const fs::path& log_path)
{
    fs::path p = log_path;
    p += ".meta.json";
    return p;
}

ProgressLog ProgressLog::init(fs::path path, std::vector<std::string> gradees, std::vector<std::string> questions,
                              bool has_general, LogMeta meta)
{
    if (gradees.empty()) {
        throw Error("cannot create a progress log without gradees");
    }
    if (questions.empty()) {
        throw Error("cannot create a progress log without questions");
    }
    ProgressLog log;
    log.path_ = std::move(path);
    log.meta_ = std::move(meta);
    log.gradees_ = std::move(gradees);
    log.questions_ = std::move(questions);
    log.has_general_ = has_general;
    for (const auto& g : log.gradees_) {
        for (const auto& q : log.scopes()) {
            log.cells_.emplace(CellKey{g, q}, CellRecord{});
        }
    }

    log.save_meta();
    log.save();
    return log;
}

ProgressLog ProgressLog::read(fs::path path)
{
    const std::string source = path.string();
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoFailure& e) {
        throw MalformedLog(e.what());
    }

    ProgressLog log;
    log.path_ = std::move(path);

    csv::Table table;
    try {
        table = csv::parse(text, source);
    } catch (const MalformedTable& e) {
        throw MalformedLog(e.what());
    }
    if (table.header != log_header) {
        throw MalformedLog(source + ": unexpected header");
    }
    if (table.rows.empty()) {
        throw MalformedLog(source + ": no cells");
    }

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t rec = table.record_numbers[r];
        CellKey key{row[0], row[1]};
        if (key.gradee.empty() || key.question.empty()) {
            throw MalformedLog(source + ": record " + std::to_string(rec) + ": empty gradee or question");
        }
        CellRecord cell;
        cell.applied_codes = split_codes(row[2], source, rec);
        cell.personalized_message = non_empty(row[3]);
        cell.issue_title = non_empty(row[4]);
        cell.issue_body = non_empty(row[5]);
        if (row[6] == "graded") {
            cell.status = CellStatus::graded;
        } else if (row[6] == "ungraded") {
            cell.status = CellStatus::ungraded;
        } else {
            throw MalformedLog(source + ": record " + std::to_string(rec) + ": unknown status '" + row[6] + "'");
        }
        if (std::find(log.gradees_.begin(), log.gradees_.end(), key.gradee) == log.gradees_.end()) {
            log.gradees_.push_back(key.gradee);
        }
        if (key.question == general_scope) {
            log.has_general_ = true;
        } else if (std::find(log.questions_.begin(), log.questions_.end(), key.question) == log.questions_.end()) {
            log.questions_.push_back(key.question);
        }
        if (!log.cells_.emplace(key, std::move(cell)).second) {
            throw MalformedLog(source + ": record " + std::to_string(rec) + ": duplicate cell (" + key.gradee + ", " +
                               key.question + ")");
        }
    }
    if (log.questions_.empty()) {
        throw MalformedLog(source + ": no questions");
    }
    const std::size_t expected = log.gradees_.size() * log.scopes().size();
    if (log.cells_.size() != expected) {
        throw MalformedLog(source + ": incomplete log (" + std::to_string(log.cells_.size()) + " of " +
                           std::to_string(expected) + " cells)");
    }

    const fs::path meta_path = meta_path_for(log.path_);
    try {
        auto meta = nlohmann::json::parse(read_file(meta_path));
        log.meta_.created_at = meta.at("created_at").get<std::string>();
        log.meta_.rubric_path = meta.at("rubric_path").get<std::string>();
        auto mode = parse_grading_mode(meta.at("mode").get<std::string>());
        if (!mode) {
            throw MalformedLog(meta_path.string() + ": unknown mode");
        }
        log.meta_.mode = *mode;
        if (meta.contains("resume_at")) {
            CellKey key{meta["resume_at"].at("gradee").get<std::string>(),
                        meta["resume_at"].at("question").get<std::string>()};
            if (!log.contains(key.gradee, key.question)) {
                throw MalformedLog(meta_path.string() + ": resume point (" + key.gradee + ", " + key.question +
                                   ") is not a cell of the log");
            }
            log.meta_.resume_at = std::move(key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedLog(meta_path.string() + ": " + e.what());
    } catch (const IoFailure& e) {
        throw MalformedLog(e.what());
    }
    return log;
}

ProgressLog ProgressLog::load(fs::path path, const std::vector<std::string>& gradees,
                              const std::vector<std::string>& questions, bool has_general)
{
    ProgressLog log = read(std::move(path));
    std::string diff = describe_difference(gradees, log.gradees_, "gradee") +
                       describe_difference(questions, log.questions_, "question");
    if (log.has_general_ && !has_general) {
        diff += " log has general cells but the rubric has no general items;";
    }
    if (!diff.empty()) {
        diff.pop_back();
        throw AxesMismatch(log.path_.string() + " does not match the roster/rubric:" + diff +
                           ". Start a new log or restore the previous roster/rubric.");
    }
    if (has_general && !log.has_general_) {
        log.add_general_axis();
    }
    return log;
}

std::vector<std::string> ProgressLog::scopes() const
{
    std::vector<std::string> out = questions_;
    if (has_general_) {
        out.emplace_back(general_scope);
    }
    return out;
}

bool ProgressLog::contains(const std::string& gradee, const std::string& question) const
{
    return cells_.count(CellKey{gradee, question}) > 0;
}

const CellRecord& ProgressLog::cell(const std::string& gradee, const std::string& question) const
{
    auto it = cells_.find(CellKey{gradee, question});
    if (it == cells_.end()) {
        throw UnknownCell(gradee, question);
    }
    return it->second;
}

CellRecord& ProgressLog::mutable_cell(const std::string& gradee, const std::string& question)
{
    auto it = cells_.find(CellKey{gradee, question});
    if (it == cells_.end()) {
        throw UnknownCell(gradee, question);
    }
    return it->second;
}

void ProgressLog::commit_cell(const std::string& gradee, const std::string& question, CellRecord record)
{
    CellRecord& target = mutable_cell(gradee, question);
    check_codes(record, {gradee, question});
    normalize(record);
    record.status = CellStatus::graded;
    CellRecord previous = std::exchange(target, std::move(record));
    try {
        save();
    } catch (...) {
        target = std::move(previous);
        throw;
    }
    if (meta_.resume_at == CellKey{gradee, question}) {
        set_resume_point(std::nullopt);
    }
}

void ProgressLog::set_resume_point(std::optional<CellKey> key)
{
    if (key && !contains(key->gradee, key->question)) {
        throw UnknownCell(key->gradee, key->question);
    }
    meta_.resume_at = std::move(key);
    save_meta();
}

void ProgressLog::save_meta() const
{
    nlohmann::json meta_json = {
        {"created_at", meta_.created_at},
        {"rubric_path", meta_.rubric_path},
        {"mode", std::string(to_string(meta_.mode))},
    };
    if (meta_.resume_at) {
        meta_json["resume_at"] = {{"gradee", meta_.resume_at->gradee}, {"question", meta_.resume_at->question}};
    }
    write_file_atomically(meta_path_for(path_), meta_json.dump(2) + "\n");
}

void ProgressLog::stage_cell(const std::string& gradee, const std::string& question, CellRecord record)
{
    CellRecord& target = mutable_cell(gradee, question);
    check_codes(record, {gradee, question});
    normalize(record);
    record.status = target.status;
    CellRecord previous = std::exchange(target, std::move(record));
    try {
        save();
    } catch (...) {
        target = std::move(previous);
        throw;
    }
}

void ProgressLog::clear_cells(const std::vector<std::string>& gradees, const std::vector<std::string>& questions)
{
    if (gradees.empty() || questions.empty()) {
        throw Error("clear_cells needs at least one gradee and one question");
    }
    for (const auto& g : gradees) {
        for (const auto& q : questions) {
            if (!contains(g, q)) {
                throw UnknownCell(g, q);
            }
        }
    }
    auto backup = cells_;
    for (const auto& g : gradees) {
        for (const auto& q : questions) {
            cells_[CellKey{g, q}] = CellRecord{};
        }
    }
    try {
        save();
    } catch (...) {
        cells_ = std::move(backup);
        throw;
    }
}

std::optional<CellKey> ProgressLog::next_pending() const
{
    const auto order = scopes();
    for (const auto& g : gradees_) {
        for (const auto& q : order) {
            if (cells_.at(CellKey{g, q}).status == CellStatus::ungraded) {
                return CellKey{g, q};
            }
        }
    }
    return std::nullopt;
}

void ProgressLog::add_general_axis()
{
    if (has_general_) {
        return;
    }
    has_general_ = true;
    for (const auto& g : gradees_) {
        cells_.emplace(CellKey{g, std::string(general_scope)}, CellRecord{});
    }
    save();
}

std::size_t ProgressLog::graded_count() const
{
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](const auto& kv) {
        return kv.second.status == CellStatus::graded;
    }));
}

std::string ProgressLog::serialize() const
{
    std::vector<csv::Record> rows;
    const auto order = scopes();
    for (const auto& g : gradees_) {
        for (const auto& q : order) {
            const CellRecord& c = cells_.at(CellKey{g, q});
            rows.push_back({
                g,
                q,
                join_codes(c.applied_codes),
                c.personalized_message.value_or(""),
                c.issue_title.value_or(""),
                c.issue_body.value_or(""),
                c.status == CellStatus::graded ? "graded" : "ungraded",
            });
        }
    }
    return csv::format_table(log_header, rows);
}

void ProgressLog::save() const
{
    write_file_atomically(path_, serialize());
}

LogLock::LogLock(const fs::path& log_path)
{
    path_ = log_path;
    path_ += ".lock";
    if (path_.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path_.parent_path(), ec);
    }
    int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
    if (fd < 0) {
        if (errno == EEXIST) {
            std::string holder;
            try {
                holder = read_file(path_);
            } catch (const IoFailure&) {
            }
            while (!holder.empty() && (holder.back() == '\n' || holder.back() == '\r')) {
                holder.pop_back();
            }
            throw LogLocked("progress log '" + log_path.string() + "' is held by another session (" + holder +
                            "); remove '" + path_.string() + "' if that session is no longer running");
        }
        throw IoFailure("cannot create lock '" + path_.string() + "': " + std::strerror(errno));
    }
    std::string content = current_timestamp() + " pid " + std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, content.data(), content.size());
    ::close(fd);
}

LogLock::~LogLock()
{
    std::error_code ec;
    fs::remove(path_, ec);
}

} // namespace gradekit
