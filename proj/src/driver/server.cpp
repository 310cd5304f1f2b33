#include "microproof/driver/server.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "microproof/driver/check.h"
#include "microproof/elab/printer.h"
#include "microproof/search/search.h"

namespace microproof::driver {

using nlohmann::json;

namespace {

constexpr int kParseError = -32700;
constexpr int kInvalidRequest = -32600;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParams = -32602;
constexpr int kUnknownDocument = -32001;
constexpr int kStaleRevision = -32002;

struct RequestError {
    int code;
    std::string message;
};

json error_response(const json& id, int code, const std::string& message) {
    return {{"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

template <typename T>
T param(const json& params, const char* name) {
    if (!params.is_object() || !params.contains(name))
        throw RequestError{kInvalidParams, fmt::format("missing parameter '{}'", name)};
    try {
        return params.at(name).get<T>();
    } catch (const json::exception&) {
        throw RequestError{kInvalidParams, fmt::format("parameter '{}' has the wrong type", name)};
    }
}

json goals_json(const tactics::Snapshot& snap) {
    json goals = json::array();
    elab::Printer printer(*snap.env, snap.mctx.get());
    for (auto g : snap.goals) {
        std::string text = printer.goal(g);
        json context = json::array();
        std::string target;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            std::string line = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
            if (line.rfind("⊢ ", 0) == 0) {
                target = line.substr(std::string("⊢ ").size());
            } else if (!line.empty()) {
                context.push_back(line);
            }
            if (end == std::string::npos) break;
            start = end + 1;
        }
        goals.push_back({{"context", context}, {"target", target}});
    }
    return goals;
}

}  // namespace

Session::Session(prelude::Library& lib, std::chrono::milliseconds debounce)
    : lib_(lib), debounce_(debounce), thread_([this] { worker(); }) {}

Session::~Session() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    cv_.notify_all();
    thread_.join();
}

json Session::handle_line(const std::string& line) {
    json request;
    try {
        request = json::parse(line);
    } catch (const json::parse_error& e) {
        return error_response(nullptr, kParseError, std::string("malformed JSON: ") + e.what());
    }
    return handle(request);
}

json Session::handle(const json& request) {
    json id = request.is_object() && request.contains("id") ? request["id"] : json(nullptr);
    if (!request.is_object() || !request.contains("method") || !request["method"].is_string())
        return error_response(id, kInvalidRequest, "a request needs an id, a method and params");
    try {
        json params = request.value("params", json::object());
        return {{"id", id}, {"result", dispatch(request["method"].get<std::string>(), params)}};
    } catch (const RequestError& e) {
        return error_response(id, e.code, e.message);
    } catch (const std::exception& e) {
        return error_response(id, kInvalidRequest, e.what());
    }
}

json Session::dispatch(const std::string& method, const json& params) {
    if (method == "open") return open(params);
    if (method == "change") return change(params);
    if (method == "goalState") return goal_state(params);
    if (method == "diagnostics") return diagnostics(params);
    if (method == "search") return search(params);
    if (method == "suggest") return suggest(params);
    if (method == "shutdown") {
        shutdown_ = true;
        return {{"ok", true}};
    }
    throw RequestError{kMethodNotFound, "unknown method '" + method + "'"};
}

std::shared_ptr<const Session::Checked> Session::run_check(const std::string& text, long revision) {
    std::lock_guard lock(check_mutex_);
    auto c = std::make_shared<Checked>();
    c->revision = revision;
    c->text = text;
    try {
        c->result = check_text(text, lib_);
    } catch (const elab::ElabError& e) {
        c->result.messages.push_back({elab::Severity::Error, e.span(), e.what(), {}, e.kind()});
    }
    return c;
}

json Session::open(const json& params) {
    auto path = param<std::string>(params, "path");
    auto text = param<std::string>(params, "text");
    long revision = params.contains("revision") ? param<long>(params, "revision") : 0;
    {
        std::lock_guard lock(mutex_);
        auto& doc = docs_[path];
        doc.text = text;
        doc.revision = revision;
        doc.due.reset();
    }
    auto checked = run_check(text, revision);
    {
        std::lock_guard lock(mutex_);
        auto& doc = docs_[path];
        if (!doc.checked || doc.checked->revision <= revision) doc.checked = checked;
    }
    json diags = json::array();
    for (const auto& m : checked->result.messages) diags.push_back(diagnostic_json(m, path));
    return {{"revision", revision}, {"diagnostics", diags}};
}

json Session::change(const json& params) {
    auto path = param<std::string>(params, "path");
    auto text = param<std::string>(params, "text");
    std::lock_guard lock(mutex_);
    auto it = docs_.find(path);
    if (it == docs_.end()) throw RequestError{kUnknownDocument, "document '" + path + "' is not open"};
    long revision = params.contains("revision") ? param<long>(params, "revision") : it->second.revision + 1;
    if (revision <= it->second.revision)
        throw RequestError{kStaleRevision, fmt::format("revision {} is not newer than {}", revision,
                                                       it->second.revision)};
    it->second.text = text;
    it->second.revision = revision;
    it->second.due = std::chrono::steady_clock::now() + debounce_;
    cv_.notify_all();
    return {{"revision", revision}, {"scheduled", true}};
}

std::pair<std::shared_ptr<const Session::Checked>, long> Session::latest(const std::string& path) {
    std::lock_guard lock(mutex_);
    auto it = docs_.find(path);
    if (it == docs_.end()) throw RequestError{kUnknownDocument, "document '" + path + "' is not open"};
    return {it->second.checked, it->second.revision};
}

json Session::goal_state(const json& params) {
    auto path = param<std::string>(params, "path");
    auto line = param<std::uint32_t>(params, "line");
    auto col = param<std::uint32_t>(params, "col");
    auto [checked, current] = latest(path);
    if (!checked) return {{"revision", nullptr}, {"stale", true}, {"goals", nullptr}, {"render", nullptr}};
    syntax::LineMap map(checked->text);
    const auto* snap = snapshot_at(checked->result, map.offset_of(line, col));
    json out{{"revision", checked->revision}, {"stale", checked->revision != current}};
    if (!snap) {
        out["goals"] = nullptr;
        out["render"] = nullptr;
    } else {
        out["goals"] = goals_json(*snap);
        out["render"] = snap->render();
    }
    return out;
}

json Session::diagnostics(const json& params) {
    auto path = param<std::string>(params, "path");
    auto [checked, current] = latest(path);
    json diags = json::array();
    if (checked)
        for (const auto& m : checked->result.messages) diags.push_back(diagnostic_json(m, path));
    return {{"revision", checked ? json(checked->revision) : json(nullptr)},
            {"stale", !checked || checked->revision != current},
            {"diagnostics", diags}};
}

json Session::search(const json& params) {
    auto query = param<std::string>(params, "query");
    std::lock_guard lock(check_mutex_);
    if (!search_env_) search_env_ = lib_.load_all();
    json results = json::array();
    for (const auto& hit : search::name_search(*search_env_, query))
        results.push_back({{"name", hit.name}, {"signature", hit.signature}});
    return {{"results", results}};
}

json Session::suggest(const json& params) {
    auto path = param<std::string>(params, "path");
    auto line = param<std::uint32_t>(params, "line");
    auto col = param<std::uint32_t>(params, "col");
    auto [checked, current] = latest(path);
    json out{{"revision", checked ? json(checked->revision) : json(nullptr)},
             {"stale", !checked || checked->revision != current},
             {"suggestions", json::array()}};
    if (!checked) return out;
    syntax::LineMap map(checked->text);
    const auto* snap = snapshot_at(checked->result, map.offset_of(line, col));
    if (!snap || snap->goals.empty()) return out;
    elab::MetaContext mctx = *snap->mctx;
    search::HeadIndex index(*snap->env);
    for (const auto& s : search::exact_search(*snap->env, mctx, snap->goals.front(), index))
        out["suggestions"].push_back(s);
    return out;
}

void Session::worker() {
    std::unique_lock lock(mutex_);
    while (!stop_) {
        std::optional<std::chrono::steady_clock::time_point> next;
        std::string due_path;
        for (const auto& [path, doc] : docs_)
            if (doc.due && (!next || *doc.due < *next)) {
                next = doc.due;
                due_path = path;
            }
        if (!next) {
            idle_cv_.notify_all();
            cv_.wait(lock);
            continue;
        }
        if (std::chrono::steady_clock::now() < *next) {
            cv_.wait_until(lock, *next);
            continue;
        }
        auto& doc = docs_[due_path];
        doc.due.reset();
        std::string text = doc.text;
        long revision = doc.revision;
        running_ = true;
        lock.unlock();
        auto checked = run_check(text, revision);
        lock.lock();
        running_ = false;
        auto& after = docs_[due_path];
        if (!after.checked || after.checked->revision <= revision) after.checked = checked;
    }
    idle_cv_.notify_all();
}

void Session::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [this] {
        if (running_) return false;
        for (const auto& [path, doc] : docs_)
            if (doc.due) return false;
        return true;
    });
}

int serve_stdio(prelude::Library& lib, std::istream& in, std::ostream& out) {
    Session session(lib);
    for (std::string line; std::getline(in, line);) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out << session.handle_line(line).dump() << '\n' << std::flush;
        if (session.shutdown_requested()) break;
    }
    return 0;
}

int serve_tcp(prelude::Library& lib, int port) {
    int server = ::socket(AF_INET, SOCK_STREAM, 0);
    if (server < 0) return 2;
    int one = 1;
    ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(server, 1) < 0) {
        ::close(server);
        return 2;
    }
    int client = ::accept(server, nullptr, nullptr);
    ::close(server);
    if (client < 0) return 2;
    Session session(lib);
    std::string buffer;
    char chunk[4096];
    bool done = false;
    while (!done) {
        ssize_t n = ::read(client, chunk, sizeof(chunk));
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        for (std::size_t nl; !done && (nl = buffer.find('\n')) != std::string::npos;) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::string reply = session.handle_line(line).dump() + "\n";
            for (std::size_t sent = 0; sent < reply.size();) {
                ssize_t w = ::write(client, reply.data() + sent, reply.size() - sent);
                if (w <= 0) {
                    done = true;
                    break;
                }
                sent += static_cast<std::size_t>(w);
            }
            if (session.shutdown_requested()) done = true;
        }
    }
    ::close(client);
    return 0;
}

}  // namespace microproof::driver
