#include <csignal>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "udnsim/service.hpp"

namespace {

httplib::Server* running_server = nullptr;

void on_signal(int)
{
    if (running_server != nullptr) {
        running_server->stop();
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"HTTP planning service for SINR coverage maps", "udnsim-server"};
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::string data_dir;
    std::string static_dir;
    udnsim::ServiceOptions options;
    app.add_option("--bind", bind, "Listen address")->capture_default_str();
    app.add_option("--port", port, "Listen port")->capture_default_str();
    app.add_option("--data-dir", data_dir, "Persistence root (default: $UDNSIM_DATA_DIR or ./udnsim-data)");
    app.add_option("--static-dir", static_dir, "Serve a built web UI from this directory");
    app.add_option("--job-workers", options.job_workers, "Concurrent map computations, 0 = cores");
    app.add_option("--engine-workers", options.engine_workers, "Threads per computation, 0 = cores");
    CLI11_PARSE(app, argc, argv);

    if (data_dir.empty()) {
        const char* env = std::getenv("UDNSIM_DATA_DIR");
        data_dir = env != nullptr && *env != '\0' ? env : "udnsim-data";
    }
    options.data_dir = data_dir;

    try {
        udnsim::PlanningService service{options};
        httplib::Server server;
        service.mount(server);
        if (!static_dir.empty() && !server.set_mount_point("/", static_dir)) {
            std::cerr << "udnsim-server: no such directory " << static_dir << "\n";
            return 2;
        }
        running_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cout << "listening on http://" << bind << ":" << port << " (data in " << data_dir << ")" << std::endl;
        if (!server.listen(bind, port)) {
            std::cerr << "udnsim-server: cannot listen on " << bind << ":" << port << "\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "udnsim-server: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
