#include "gradekit/api_server.hpp"

#include "gradekit/atomic_file.hpp"
#include "gradekit/terminal.hpp"

#include <httplib.h>

#include <filesystem>
#include <ostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace gradekit {

namespace {

constexpr const char* placeholder_page = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>gradekit</title></head>
<body>
<h1>gradekit grading session</h1>
<p>The web console assets are not installed. Start the server with
<code>--static-dir</code> pointing at the built console, or use the JSON API
under <code>/api/</code>.</p>
</body></html>
)";

bool valid_utf8(const std::string& s)
{
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > s.size() || (len == 1 && c == 0)) {
            return false;
        }
        for (std::size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) {
                return false;
            }
        }
        i += len;
    }
    return true;
}

std::string media_type_for(const fs::path& p)
{
    std::string ext = p.extension().string();
    if (ext == ".md" || ext == ".Rmd" || ext == ".qmd") {
        return "text/markdown";
    }
    if (ext == ".html" || ext == ".htm") {
        return "text/html";
    }
    if (ext == ".pdf") {
        return "application/pdf";
    }
    if (ext == ".png") {
        return "image/png";
    }
    if (ext == ".jpg" || ext == ".jpeg") {
        return "image/jpeg";
    }
    return "text/plain";
}

json item_json(const RubricItem& item, GradingMode mode)
{
    return {
        {"applicability", item.applicability.name()},
        {"total_points", item.total_points ? json(item.total_points->str()) : json(nullptr)},
        {"code", item.prompt_code},
        {"message", item.prompt_message},
        {"feedback", item.feedback},
        {"points", item.points.str()},
        {"display", format_prompt_item(item, mode)},
    };
}

std::string required_string(const json& body, const char* key)
{
    if (!body.contains(key) || !body[key].is_string()) {
        throw InputError(key, std::string("field '") + key + "' must be a string");
    }
    return body[key].get<std::string>();
}

std::string optional_string(const json& body, const char* key)
{
    if (!body.contains(key) || body[key].is_null()) {
        return {};
    }
    if (!body[key].is_string()) {
        throw InputError(key, std::string("field '") + key + "' must be a string");
    }
    return body[key].get<std::string>();
}

Decimal decimal_field(const json& body, const char* key)
{
    std::string text;
    if (body.contains(key) && body[key].is_string()) {
        text = body[key].get<std::string>();
    } else if (body.contains(key) && body[key].is_number()) {
        text = body[key].dump();
    } else {
        throw InputError(key, std::string("field '") + key + "' must be a decimal number");
    }
    auto d = Decimal::parse(text);
    if (!d) {
        throw InputError(key, std::string("field '") + key + "' value '" + text +
                                  "' is not a decimal number (max 4 decimals)");
    }
    return *d;
}

void send_json(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, const std::string& token = {})
{
    json body = {{"error", message}};
    if (!token.empty()) {
        body["token"] = token;
    }
    send_json(res, status, body);
}

} // namespace

json describe_submission(const std::string& path)
{
    json out = {{"path", path}};
    std::error_code ec;
    if (!fs::exists(path, ec)) {
        out["media_kind"] = "missing";
        return out;
    }
    if (fs::is_directory(path, ec)) {
        out["media_kind"] = "directory";
        json files = json::array();
        std::vector<std::string> names;
        for (const auto& entry : fs::recursive_directory_iterator(path, ec)) {
            if (entry.is_regular_file()) {
                names.push_back(fs::relative(entry.path(), path).generic_string());
            }
        }
        std::sort(names.begin(), names.end());
        for (auto& n : names) {
            files.push_back(std::move(n));
        }
        out["files"] = std::move(files);
        return out;
    }
    out["size"] = fs::file_size(path, ec);
    out["media_type"] = media_type_for(path);
    if (fs::file_size(path, ec) <= max_text_submission) {
        std::string content = read_file(path);
        if (valid_utf8(content)) {
            out["media_kind"] = "text";
            out["text"] = std::move(content);
            return out;
        }
    }
    out["media_kind"] = "binary";
    out["download"] = "/api/submission/raw";
    return out;
}

Action action_from_json(const json& body, const Session& session)
{
    if (!body.is_object()) {
        throw InputError("", "request body must be a JSON object");
    }
    const std::string type = required_string(body, "type");
    if (type == "apply_codes") {
        if (!body.contains("codes") || !body["codes"].is_array()) {
            throw InputError("codes", "field 'codes' must be an array of prompt codes");
        }
        // An empty array commits the cell with nothing applied. Visibility and
        // duplicates are checked by Session::apply.
        action::ApplyCodes apply;
        for (const auto& c : body["codes"]) {
            if (!c.is_string()) {
                throw InputError("codes", "field 'codes' must be an array of prompt codes");
            }
            apply.codes.push_back(c.get<std::string>());
        }
        return apply;
    }
    if (type == "personalized_message") {
        return action::PersonalizedMessage{required_string(body, "message")};
    }
    if (type == "new_rubric_item") {
        const json& spec = body.contains("item") ? body["item"] : body;
        if (!spec.is_object()) {
            throw InputError("item", "field 'item' must be an object");
        }
        RubricItem item;
        std::string scope = optional_string(spec, "applicability");
        if (scope.empty() && session.current()) {
            scope = session.current()->question;
        }
        item.applicability = Applicability::from_name(scope);
        item.prompt_code = required_string(spec, "prompt_code");
        item.prompt_message = optional_string(spec, "prompt_message");
        item.feedback = optional_string(spec, "feedback");
        item.points = decimal_field(spec, "points");
        if (spec.contains("total_points") && !spec["total_points"].is_null()) {
            item.total_points = decimal_field(spec, "total_points");
        }
        return action::NewRubricItem{std::move(item)};
    }
    if (type == "note_issue") {
        if (!session.config().github_issues) {
            throw InputError("github_issues", "note_issue requires the github_issues flag (--github-issues)");
        }
        return action::NoteIssue{required_string(body, "title"), optional_string(body, "body")};
    }
    if (type == "skip") {
        return action::Skip{};
    }
    if (type == "quit") {
        return action::Quit{};
    }
    throw InputError(type, "unknown action type '" + type + "'");
}

json snapshot_json(const Session& session)
{
    const auto& log = session.log();
    json snap;
    snap["finished"] = session.finished();
    snap["mode"] = std::string(to_string(session.rubric().mode()));
    snap["github_issues"] = session.config().github_issues;
    snap["progress"] = {
        {"graded", log.graded_count()},
        {"total", log.cell_count()},
        {"pending_in_scope", session.pending_in_scope()},
    };
    if (const auto& cur = session.current()) {
        snap["current"] = {{"gradee", cur->gradee}, {"question", cur->question}};
        json items = json::array();
        for (const auto& item : session.visible_items()) {
            items.push_back(item_json(item, session.rubric().mode()));
        }
        snap["visible_items"] = std::move(items);
        auto message = session.pending_message();
        snap["pending_message"] = message.has_value();
        snap["pending_message_text"] = message ? json(*message) : json(nullptr);
        snap["submission"] = describe_submission(session.workspace().submission_path(cur->gradee));
    } else {
        snap["current"] = nullptr;
        snap["visible_items"] = json::array();
        snap["pending_message"] = false;
        snap["pending_message_text"] = nullptr;
        snap["submission"] = nullptr;
    }
    return snap;
}

ApiServer::ApiServer(Session& session, std::ostream& log_out)
    : session_(session), log_out_(log_out), server_(std::make_unique<httplib::Server>())
{
}

ApiServer::~ApiServer()
{
    stop();
    if (stopper_.joinable()) {
        stopper_.join();
    }
}

void ApiServer::stop()
{
    server_->stop();
}

int ApiServer::bind(const ServerOptions& options)
{
    const bool loopback = options.host == "127.0.0.1" || options.host == "localhost" || options.host == "::1";
    if (!loopback && !options.allow_remote) {
        throw BindFailure("refusing to bind to '" + options.host + "' without --allow-remote");
    }
    install_routes(options);
    int port = options.port;
    if (port == 0) {
        port = server_->bind_to_any_port(options.host);
        if (port < 0) {
            throw BindFailure("cannot bind to " + options.host);
        }
    } else if (!server_->bind_to_port(options.host, port)) {
        throw BindFailure("cannot bind to " + options.host + ":" + std::to_string(port));
    }
    return port;
}

void ApiServer::run()
{
    {
        std::lock_guard out_lock(out_mutex_);
        for (const auto& effect : session_.start_effects()) {
            run_effect(session_, effect, log_out_);
        }
    }
    server_->listen_after_bind();
}

void ApiServer::install_routes(const ServerOptions& options)
{
    auto& srv = *server_;

    srv.Get("/api/session", [this](const httplib::Request&, httplib::Response& res) {
        std::shared_lock lock(state_mutex_);
        send_json(res, 200, snapshot_json(session_));
    });

    srv.Get("/api/rubric", [this](const httplib::Request&, httplib::Response& res) {
        std::shared_lock lock(state_mutex_);
        const Rubric& rubric = session_.rubric();
        json items = json::array();
        for (const auto& item : rubric.items()) {
            items.push_back(item_json(item, rubric.mode()));
        }
        json questions = json::array();
        for (const auto& q : rubric.questions()) {
            questions.push_back({{"name", q}, {"total_points", rubric.total_points(q).str()}});
        }
        send_json(res, 200,
                  {{"mode", std::string(to_string(rubric.mode()))},
                   {"questions", questions},
                   {"has_general", rubric.has_general()},
                   {"items", items}});
    });

    srv.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
        std::shared_lock lock(state_mutex_);
        const auto& log = session_.log();
        json cells = json::array();
        for (const auto& g : log.gradee_order()) {
            for (const auto& q : log.scopes()) {
                cells.push_back({{"gradee", g},
                                 {"question", q},
                                 {"status", log.cell(g, q).status == CellStatus::graded ? "graded" : "ungraded"}});
            }
        }
        send_json(res, 200,
                  {{"graded", log.graded_count()},
                   {"total", log.cell_count()},
                   {"pending_in_scope", session_.pending_in_scope()},
                   {"missing_submissions", session_.workspace().missing()},
                   {"cells", cells}});
    });

    srv.Get("/api/submission/current", [this](const httplib::Request&, httplib::Response& res) {
        std::shared_lock lock(state_mutex_);
        if (!session_.current()) {
            send_error(res, 404, "no current submission");
            return;
        }
        send_json(res, 200, describe_submission(session_.workspace().submission_path(session_.current()->gradee)));
    });

    srv.Get("/api/submission/raw", [this](const httplib::Request&, httplib::Response& res) {
        std::shared_lock lock(state_mutex_);
        if (!session_.current()) {
            send_error(res, 404, "no current submission");
            return;
        }
        const std::string& path = session_.workspace().submission_path(session_.current()->gradee);
        std::error_code ec;
        if (!fs::is_regular_file(path, ec)) {
            send_error(res, 404, "submission is not a single file");
            return;
        }
        res.set_content(read_file(path), media_type_for(path));
    });

    srv.Get("/api/gradesheet/preview", [this](const httplib::Request&, httplib::Response& res) {
        std::shared_lock lock(state_mutex_);
        try {
            GradeSheet sheet = session_.workspace().grade_sheet(session_.log());
            send_json(res, 200, {{"columns", sheet.columns}, {"rows", sheet.rows}, {"csv", sheet.to_csv()}});
        } catch (const Error& e) {
            send_error(res, 500, e.what());
        }
    });

    srv.Post("/api/action", [this](const httplib::Request& req, httplib::Response& res) {
        std::unique_lock busy(action_mutex_, std::try_to_lock);
        if (!busy.owns_lock()) {
            send_error(res, 409, "another action is in progress");
            return;
        }
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            send_error(res, 400, std::string("invalid JSON: ") + e.what());
            return;
        }

        bool quit = false;
        {
            std::unique_lock lock(state_mutex_);
            if (session_.finished()) {
                send_error(res, 409, "the grading session has ended");
                return;
            }
            try {
                Action act = action_from_json(body, session_);
                quit = std::holds_alternative<action::Quit>(act);
                auto effects = session_.apply(act);
                std::lock_guard out_lock(out_mutex_);
                for (const auto& effect : effects) {
                    run_effect(session_, effect, log_out_);
                }
            } catch (const InputError& e) {
                send_error(res, 400, e.what(), e.token());
                return;
            } catch (const ValidationError& e) {
                send_error(res, 400, describe(e));
                return;
            } catch (const UnknownQuestion& e) {
                send_error(res, 400, e.what());
                return;
            } catch (const Error& e) {
                send_error(res, 500, e.what());
                return;
            }
            send_json(res, 200, snapshot_json(session_));
            quit = quit || session_.finished();
        }
        if (quit && !stopper_.joinable()) {
            stopper_ = std::thread([this] { server_->stop(); });
        }
    });

    if (!options.static_dir.empty()) {
        if (!srv.set_mount_point("/", options.static_dir.string())) {
            throw Error("static directory '" + options.static_dir.string() + "' does not exist");
        }
    } else {
        srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(placeholder_page, "text/html");
        });
    }
}

} // namespace gradekit
