#ifndef GIFTSMITH_SERVICE_HPP
#define GIFTSMITH_SERVICE_HPP

#include "giftsmith/bank.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace giftsmith {

inline constexpr int kDefaultPort = 8787;

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
};

/// Backend for the authoring UI. Requests are plain values so the routing
/// can be exercised without a socket; LoopbackServer puts it on HTTP.
///
/// Mutations are serialized and persisted before they become visible, so a
/// 2xx response means the change is on disk. Reads use the last committed
/// snapshot and never wait for a writer.
class AuthoringService {
public:
    /// Opens `bank_path`, or starts from an empty bank when it does not exist.
    explicit AuthoringService(std::filesystem::path bank_path);

    /// `target` is the request path including any query string.
    HttpResponse handle_request(std::string_view method, std::string_view target,
                                std::string_view body);

    std::shared_ptr<const Bank> snapshot() const;

private:
    template <class F>
    HttpResponse mutate(F&& op);

    std::filesystem::path path_;
    mutable std::mutex snapshot_mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const Bank> bank_;
};

/// cpp-httplib server bound to 127.0.0.1.
class LoopbackServer {
public:
    explicit LoopbackServer(AuthoringService& service);
    ~LoopbackServer();
    LoopbackServer(const LoopbackServer&) = delete;
    LoopbackServer& operator=(const LoopbackServer&) = delete;

    /// Binds the port (0 picks a free one) and returns the bound port, or -1.
    int bind(int port);
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace giftsmith

#endif
