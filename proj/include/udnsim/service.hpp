#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "udnsim/engine.hpp"
#include "udnsim/heatmap.hpp"

namespace httplib {
class Server;
}

namespace udnsim {

/// An API failure carrying the HTTP status it maps to.
class ApiError : public std::runtime_error {
public:
    ApiError(int status, const std::string& message, std::string field = {})
        : std::runtime_error(message), status_{status}, field_{std::move(field)}
    {
    }
    int status() const noexcept { return status_; }
    const std::string& field() const noexcept { return field_; }

private:
    int status_;
    std::string field_;
};

struct ServiceOptions {
    std::filesystem::path data_dir;  ///< empty keeps everything in memory
    unsigned job_workers = 0;        ///< concurrent map computations, 0 = cores
    unsigned engine_workers = 0;     ///< threads inside one computation, 0 = cores
};

enum class JobStatus { Queued, Running, Done, Failed, Cancelled };

std::string_view to_string(JobStatus s) noexcept;

/// {resolution, side_km, direction, values} plus fingerprint and trials.
nlohmann::json map_to_json(const CoverageMap& map);
CoverageMap map_from_json(const nlohmann::json& j);

/// Scenario store and asynchronous map computation behind the HTTP API.
///
/// BS indices are positions in the scenario's BS list: stable across
/// additions, compacted by a delete (later BSs shift down by one). Every
/// mutation bumps the scenario revision. A job snapshots the scenario's
/// config and deployment when it is submitted, so later edits never reach
/// it. At most one job per scenario runs at a time.
class PlanningService {
public:
    explicit PlanningService(ServiceOptions options = {});
    ~PlanningService();
    PlanningService(const PlanningService&) = delete;
    PlanningService& operator=(const PlanningService&) = delete;

    nlohmann::json create_scenario(const nlohmann::json& config);
    nlohmann::json get_scenario(const std::string& id) const;
    nlohmann::json list_scenarios() const;
    void delete_scenario(const std::string& id);
    nlohmann::json add_bs(const std::string& id, const nlohmann::json& point);
    nlohmann::json remove_bs(const std::string& id, std::size_t index);

    /// Queues a map computation. Body: {direction?, resolution?, trials?}.
    nlohmann::json submit(const std::string& scenario_id, const nlohmann::json& request);
    nlohmann::json job_status(const std::string& job_id) const;
    /// 409 until the job is done, 410 once it was cancelled.
    CoverageMap job_result(const std::string& job_id) const;
    nlohmann::json cancel_job(const std::string& job_id);
    DiffMap diff_jobs(const std::string& a, const std::string& b) const;

    /// Blocks until the job leaves queued/running or the timeout passes.
    JobStatus wait(const std::string& job_id, std::chrono::milliseconds timeout) const;

    /// Registers every endpoint on `server`.
    void mount(httplib::Server& server);

private:
    struct Scenario {
        std::string id;
        ScenarioConfig config;
        std::vector<Point2D> bs;
        std::uint64_t revision = 1;
        std::string created;
        std::string modified;
    };
    struct Job {
        std::string id;
        std::string scenario_id;
        std::uint64_t revision = 0;
        ScenarioConfig config;
        Deployment deployment;
        std::string created;
        JobStatus status = JobStatus::Queued;
        std::atomic<double> progress{0.0};
        std::atomic<bool> cancel{false};
        std::optional<CoverageMap> result;
        std::string error;
    };

    nlohmann::json record_json(const Scenario& s) const;
    nlohmann::json job_json(const Job& job) const;
    Scenario& scenario_locked(const std::string& id);
    const Scenario& scenario_locked(const std::string& id) const;
    std::shared_ptr<Job> job_locked(const std::string& id) const;
    std::string new_id(const char* prefix);
    void touch(Scenario& s);
    void persist(const Scenario& s) const;
    void persist(const Job& job) const;
    void load();
    void worker_loop();
    void run_job(const std::shared_ptr<Job>& job);

    ServiceOptions options_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::map<std::string, Scenario> scenarios_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::deque<std::shared_ptr<Job>> queue_;
    std::set<std::string> busy_scenarios_;
    std::uint64_t id_counter_ = 0;
    std::uint64_t id_salt_ = 0;
    bool stopping_ = false;
    std::vector<std::jthread> workers_;
};

} // namespace udnsim
