#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

namespace democlust {

struct ServiceConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::size_t max_upload = 10 * 1024 * 1024;
    std::size_t top_f = 5;
    double eps_fraction = 0.05;
    /// When set, sessions persist as <id>.csv plus <id>.jsonl (op history)
    /// and are replayed on start.
    std::string state_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    /// Defaults overridden by DEMOCLUST_BIND (host or host:port),
    /// DEMOCLUST_MAX_UPLOAD, DEMOCLUST_TOP_F, DEMOCLUST_EPS_FRACTION and
    /// DEMOCLUST_STATE_DIR.
    static ServiceConfig from_env();
};

/// HTTP/JSON front end over an in-memory session store.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Bind (port 0 picks a free one) and serve on a background thread.
    /// Returns the bound port, or -1 on failure.
    int start();
    /// Bind and serve on the calling thread until stop().
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace democlust
