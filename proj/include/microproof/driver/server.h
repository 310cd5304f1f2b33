#pragma once

#include <chrono>
#include <condition_variable>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "json.hpp"
#include "microproof/driver/frontend.h"
#include "microproof/prelude/library.h"

namespace microproof::driver {

/// One client's documents and check results. `change` requests are debounced
/// and re-checked on a worker thread; queries answer from the latest completed
/// check and flag it as stale when a newer revision is pending.
class Session {
public:
    explicit Session(prelude::Library& lib, std::chrono::milliseconds debounce = std::chrono::milliseconds(150));
    ~Session();
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    /// Parses and answers one request line. Malformed input yields an error response.
    nlohmann::json handle_line(const std::string& line);
    nlohmann::json handle(const nlohmann::json& request);

    bool shutdown_requested() const { return shutdown_; }
    /// Blocks until no re-check is queued or running.
    void wait_idle();

private:
    struct Checked {
        long revision = 0;
        std::string text;
        FileResult result;
    };
    struct Document {
        std::string text;
        long revision = 0;
        std::shared_ptr<const Checked> checked;
        std::optional<std::chrono::steady_clock::time_point> due;
    };

    nlohmann::json dispatch(const std::string& method, const nlohmann::json& params);
    nlohmann::json open(const nlohmann::json& params);
    nlohmann::json change(const nlohmann::json& params);
    nlohmann::json goal_state(const nlohmann::json& params);
    nlohmann::json diagnostics(const nlohmann::json& params);
    nlohmann::json search(const nlohmann::json& params);
    nlohmann::json suggest(const nlohmann::json& params);

    std::shared_ptr<const Checked> run_check(const std::string& text, long revision);
    std::pair<std::shared_ptr<const Checked>, long> latest(const std::string& path);
    void worker();

    prelude::Library& lib_;
    std::chrono::milliseconds debounce_;
    std::mutex check_mutex_;  // the library and checker are used by one thread at a time
    std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable idle_cv_;
    std::map<std::string, Document> docs_;
    bool running_ = false;
    bool stop_ = false;
    bool shutdown_ = false;
    std::optional<kernel::Environment> search_env_;
    std::thread thread_;
};

/// Serves newline-delimited JSON requests until `shutdown` or end of input.
int serve_stdio(prelude::Library& lib, std::istream& in, std::ostream& out);
/// Accepts one client on 127.0.0.1:`port` and serves it.
int serve_tcp(prelude::Library& lib, int port);

}  // namespace microproof::driver
