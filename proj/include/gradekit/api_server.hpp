#pragma once

#include "gradekit/engine.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

/**
 * @file api_server.hpp
 * @brief Local HTTP/JSON facade over a running grading Session.
 *
 *   GET  /api/session             snapshot of the session
 *   GET  /api/rubric              rubric items and questions
 *   GET  /api/submission/current  current submission (text up to 2 MiB)
 *   GET  /api/submission/raw      current submission bytes
 *   GET  /api/progress            graded/total counters
 *   GET  /api/gradesheet/preview  grade sheet computed from the current log
 *   POST /api/action              {"type": apply_codes | personalized_message |
 *                                  new_rubric_item | note_issue | skip | quit, ...}
 *
 * Mutations go through the session one at a time; a second action arriving
 * while one is being processed gets 409.
 */

namespace gradekit {

class BindFailure : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t max_text_submission = 2 * 1024 * 1024;

/// Describes a submission path: media kind, and its text when it is a
/// UTF-8 text file no larger than max_text_submission.
nlohmann::json describe_submission(const std::string& path);

/// Translates a POST /api/action body into an engine Action. Throws InputError.
Action action_from_json(const nlohmann::json& body, const Session& session);

nlohmann::json snapshot_json(const Session& session);

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8765; // 0 picks a free port
    bool allow_remote = false;
    std::filesystem::path static_dir;
};

class ApiServer {
public:
    ApiServer(Session& session, std::ostream& log_out);
    ~ApiServer();

    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds the listening socket and returns the port. Throws BindFailure,
    /// or Error when a non-loopback host is requested without allow_remote.
    int bind(const ServerOptions& options);

    /// Serves until a quit action or stop(). Runs the session's start
    /// effects first.
    void run();
    void stop();

private:
    void install_routes(const ServerOptions& options);

    Session& session_;
    std::ostream& log_out_;
    std::unique_ptr<httplib::Server> server_;
    std::mutex action_mutex_;
    mutable std::shared_mutex state_mutex_;
    std::mutex out_mutex_;
    std::thread stopper_;
};

} // namespace gradekit
