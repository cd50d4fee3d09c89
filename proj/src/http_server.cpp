// HTTP and WebSocket transport for SessionManager. Blocking Beast I/O, one
// thread per connection.

#include <sys/socket.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "respact/session_service.hpp"

namespace respact::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

Response json_response(const Request& req, int status, const Json& body) {
    Response res{static_cast<http::status>(status), req.version()};
    res.set(http::field::content_type, "application/json");
    res.set(http::field::cache_control, "no-store");
    res.keep_alive(req.keep_alive());
    res.body() = body.dump();
    res.prepare_payload();
    return res;
}

Response api_response(const Request& req, const ApiResult& r) {
    if (r) return json_response(req, r->status, r->body);
    return json_response(req, r.error().status, r.error().body());
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        const std::size_t b = i;
        while (i < path.size() && path[i] != '/') ++i;
        if (i > b) parts.emplace_back(path.substr(b, i - b));
    }
    return parts;
}

bool query_flag(std::string_view query, std::string_view key) {
    std::size_t i = 0;
    while (i <= query.size()) {
        const std::size_t amp = std::min(query.find('&', i), query.size());
        const std::string_view kv = query.substr(i, amp - i);
        const auto eq = kv.find('=');
        if (kv.substr(0, eq) == key) {
            const std::string_view v = eq == std::string_view::npos ? "true" : kv.substr(eq + 1);
            return v == "true" || v == "1";
        }
        i = amp + 1;
    }
    return false;
}

std::string mime_type(const std::string& path) {
    auto ends = [&](std::string_view ext) {
        return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
    };
    if (ends(".html")) return "text/html";
    if (ends(".js")) return "application/javascript";
    if (ends(".css")) return "text/css";
    if (ends(".json")) return "application/json";
    if (ends(".svg")) return "image/svg+xml";
    if (ends(".png")) return "image/png";
    return "application/octet-stream";
}

}  // namespace

struct Server::Impl {
    explicit Impl(ServiceConfig c) : cfg(c), manager(std::move(c)), acceptor(ioc) {}

    ServiceConfig cfg;
    SessionManager manager;
    net::io_context ioc;
    tcp::acceptor acceptor;
    std::atomic<bool> stopping{false};
    std::thread accept_thread;
    std::thread sweeper;
    std::mutex conn_mu;
    std::condition_variable conn_cv;
    std::set<int> open_fds;
    std::size_t active = 0;

    unsigned short start() {
        const auto addr = net::ip::make_address(cfg.host);
        tcp::endpoint ep{addr, cfg.port};
        acceptor.open(ep.protocol());
        acceptor.set_option(net::socket_base::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen();
        const unsigned short port = acceptor.local_endpoint().port();
        accept_thread = std::thread([this] { accept_loop(); });
        sweeper = std::thread([this] { sweep_loop(); });
        return port;
    }

    void stop() {
        if (stopping.exchange(true)) return;
        ::shutdown(acceptor.native_handle(), SHUT_RDWR);
        if (accept_thread.joinable()) accept_thread.join();
        beast::error_code ec;
        acceptor.close(ec);
        {
            std::unique_lock lock(conn_mu);
            for (int fd : open_fds) ::shutdown(fd, SHUT_RDWR);
            conn_cv.wait(lock, [this] { return active == 0; });
        }
        if (sweeper.joinable()) sweeper.join();
    }

    void sweep_loop() {
        while (!stopping) {
            manager.sweep();
            for (int i = 0; i < 10 && !stopping; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
    }

    void accept_loop() {
        while (!stopping) {
            tcp::socket socket(ioc);
            beast::error_code ec;
            acceptor.accept(socket, ec);
            if (ec) {
                if (stopping) return;
                continue;
            }
            std::lock_guard lock(conn_mu);
            ++active;
            open_fds.insert(socket.native_handle());
            std::thread([this, s = std::move(socket)]() mutable { connection(std::move(s)); }).detach();
        }
    }

    void connection(tcp::socket socket) {
        const int fd = socket.native_handle();
        try {
            serve_connection(socket);
        } catch (const std::exception&) {
            // Peer went away or sent garbage; nothing to report.
        }
        {
            std::lock_guard lock(conn_mu);
            open_fds.erase(fd);
        }
        beast::error_code ec;
        socket.shutdown(tcp::socket::shutdown_both, ec);
        socket.close(ec);
        std::lock_guard lock(conn_mu);
        --active;
        conn_cv.notify_all();
    }

    void serve_connection(tcp::socket& socket) {
        beast::flat_buffer buffer;
        while (!stopping) {
            Request req;
            beast::error_code ec;
            http::read(socket, buffer, req, ec);
            if (ec) return;

            if (websocket::is_upgrade(req)) {
                serve_websocket(socket, std::move(req));
                return;
            }
            Response res = handle(req);
            const bool keep = res.keep_alive();
            http::write(socket, res, ec);
            if (ec || !keep) return;
        }
    }

    Response handle(const Request& req) {
        const std::string_view target(req.target().data(), req.target().size());
        const auto qpos = target.find('?');
        const std::string_view path = target.substr(0, qpos);
        const std::string_view query = qpos == std::string_view::npos ? "" : target.substr(qpos + 1);
        const auto parts = split_path(path);
        const bool get = req.method() == http::verb::get;
        const bool post = req.method() == http::verb::post;
        auto method_not_allowed = [&] { return json_response(req, 405, {{"error", "method_not_allowed"}}); };

        if (parts.size() == 1 && parts[0] == "healthz") {
            if (!get) return method_not_allowed();
            return json_response(req, 200, {{"status", "ok"}, {"live_sessions", manager.live_sessions()}});
        }
        if (!parts.empty() && parts[0] == "api") {
            if (parts.size() == 2 && parts[1] == "sessions") {
                if (!post) return method_not_allowed();
                Json body;
                try {
                    body = req.body().empty() ? Json::object() : Json::parse(req.body());
                } catch (const Json::exception&) {
                    return json_response(req, 400, {{"error", "bad_request"}, {"message", "body is not valid JSON"}});
                }
                return api_response(req, manager.create(body));
            }
            if (parts.size() >= 3 && parts[1] == "sessions") {
                const std::string& id = parts[2];
                if (parts.size() == 3) {
                    if (!get) return method_not_allowed();
                    return api_response(req, manager.status(id));
                }
                if (parts.size() == 4 && parts[3] == "advance") {
                    if (!post) return method_not_allowed();
                    return api_response(req, manager.advance(id));
                }
                if (parts.size() == 4 && parts[3] == "reply") {
                    if (!post) return method_not_allowed();
                    Json body;
                    try {
                        body = Json::parse(req.body());
                    } catch (const Json::exception&) {
                        body = nullptr;  // reported as 422 unless the session is missing or busy
                    }
                    return api_response(req, manager.reply(id, body));
                }
                if (parts.size() == 4 && parts[3] == "transcript") {
                    if (!get) return method_not_allowed();
                    return api_response(req, manager.transcript(id, query_flag(query, "wizard")));
                }
                if (parts.size() == 4 && parts[3] == "events") {
                    if (!manager.find(id)) return json_response(req, 404, {{"error", "not_found"}});
                    return json_response(req, 426, {{"error", "upgrade_required"}});
                }
            }
            return json_response(req, 404, {{"error", "not_found"}});
        }
        if (get) return static_file(req, path);
        return json_response(req, 404, {{"error", "not_found"}});
    }

    Response static_file(const Request& req, std::string_view path) {
        if (cfg.static_dir.empty() || path.find("..") != std::string_view::npos)
            return json_response(req, 404, {{"error", "not_found"}});
        std::string rel(path);
        if (rel.empty() || rel.back() == '/') rel += "index.html";
        const std::string file = cfg.static_dir + rel;
        std::ifstream in(file, std::ios::binary);
        if (!in) return json_response(req, 404, {{"error", "not_found"}});
        std::ostringstream ss;
        ss << in.rdbuf();
        Response res{http::status::ok, req.version()};
        res.set(http::field::content_type, mime_type(file));
        res.keep_alive(req.keep_alive());
        res.body() = ss.str();
        res.prepare_payload();
        return res;
    }

    void serve_websocket(tcp::socket& socket, Request req) {
        const std::string_view target(req.target().data(), req.target().size());
        const auto parts = split_path(target.substr(0, target.find('?')));
        std::shared_ptr<Session> session;
        if (parts.size() == 4 && parts[0] == "api" && parts[1] == "sessions" && parts[3] == "events")
            session = manager.find(parts[2]);
        if (!session) {
            Response res = json_response(req, 404, {{"error", "not_found"}});
            res.keep_alive(false);
            http::write(socket, res);
            return;
        }

        websocket::stream<tcp::socket&> ws(socket);
        ws.accept(req);
        ws.text(true);
        std::size_t seen = 0;
        while (!stopping) {
            auto [fresh, done] = session->wait_events(seen, std::chrono::milliseconds(200));
            for (const Event& e : fresh) {
                ws.write(net::buffer(Json{{"type", "event"}, {"event", to_json(e)}}.dump()));
                ++seen;
            }
            if (done && fresh.empty()) {
                const auto outcome = session->outcome();
                ws.write(net::buffer(
                    Json{{"type", "done"}, {"outcome", outcome ? std::string(to_string(*outcome)) : ""}}.dump()));
                beast::error_code ec;
                ws.close(websocket::close_code::normal, ec);
                return;
            }
        }
    }
};

Server::Server(ServiceConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

Server::~Server() { stop(); }

unsigned short Server::start() { return impl_->start(); }

void Server::stop() {
    if (impl_) impl_->stop();
}

SessionManager& Server::sessions() { return impl_->manager; }

namespace {
std::atomic<bool> g_shutdown{false};
void on_signal(int) { g_shutdown = true; }
}  // namespace

int serve_forever(const ServiceConfig& cfg) {
    Server server(cfg);
    const unsigned short port = server.start();
    std::cout << "listening on http://" << cfg.host << ":" << port << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_shutdown) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server.stop();
    return 0;
}

}  // namespace respact::service
