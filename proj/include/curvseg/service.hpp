#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

namespace curvseg {

inline constexpr int kMaxServiceSide = 1024;

struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Request handlers, usable without a socket. Bodies are JSON.
HttpReply handle_segment(const std::string& body);
HttpReply handle_corpus_list();
HttpReply handle_corpus_case(const std::string& name);

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;                  // 0 picks a free port
    std::filesystem::path static_dir;  // UI bundle served at /, optional
    int workers = 0;                  // 0: hardware concurrency
    std::size_t queue_limit = 64;     // queued requests beyond this are refused
};

class Server {
public:
    explicit Server(ServiceConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the listening socket and returns the bound port.
    int bind();
    /// Serves until stop(); call bind() first.
    void serve();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace curvseg
