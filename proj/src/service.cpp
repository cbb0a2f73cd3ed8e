#include "udnsim/service.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <httplib.h>

#include "udnsim/config.hpp"

namespace udnsim {

using nlohmann::json;

namespace {

constexpr double macro_isd_km = 0.5;

std::string now_iso()
{
    using namespace std::chrono;
    const auto now = system_clock::now();
    const std::time_t t = system_clock::to_time_t(now);
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    const auto n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    std::snprintf(buf + n, sizeof buf - n, ".%03dZ", static_cast<int>(ms));
    return buf;
}

Deployment deployment_of(const ScenarioConfig& config, const std::vector<Point2D>& bs)
{
    Deployment d;
    d.region = config.region();
    d.bs_positions = bs;
    d.bs_antenna_height_m = config.bs_antenna_height_m;
    d.ue_antenna_height_m = config.ue_antenna_height_m;
    d.macro_grid = build_macro_grid(d.region, macro_isd_km);
    return d;
}

json points_json(const std::vector<Point2D>& points)
{
    json a = json::array();
    for (const auto& p : points) {
        a.push_back({{"x_km", p.x_km}, {"y_km", p.y_km}});
    }
    return a;
}

std::vector<Point2D> points_from_json(const json& a)
{
    std::vector<Point2D> out;
    for (const auto& p : a) {
        out.push_back({p.at("x_km").get<double>(), p.at("y_km").get<double>()});
    }
    return out;
}

JobStatus parse_status(std::string_view s)
{
    for (auto st : {JobStatus::Queued, JobStatus::Running, JobStatus::Done, JobStatus::Failed, JobStatus::Cancelled}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw std::invalid_argument("unknown job status");
}

void write_atomically(const std::filesystem::path& path, const std::string& bytes)
{
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return json::parse(ss.str());
}

bool finished(JobStatus s) noexcept
{
    return s == JobStatus::Done || s == JobStatus::Failed || s == JobStatus::Cancelled;
}

} // namespace

std::string_view to_string(JobStatus s) noexcept
{
    switch (s) {
    case JobStatus::Queued: return "queued";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
    case JobStatus::Cancelled: return "cancelled";
    }
    return "?";
}

json map_to_json(const CoverageMap& map)
{
    return {{"resolution", map.resolution},
            {"side_km", map.side_km},
            {"direction", to_string(map.direction)},
            {"values", map.coverage},
            {"fingerprint", map.fingerprint},
            {"trials", map.trials.empty() ? 0U : map.trials.front()}};
}

CoverageMap map_from_json(const json& j)
{
    CoverageMap m;
    m.resolution = j.at("resolution").get<int>();
    m.side_km = j.at("side_km").get<double>();
    m.direction = parse_direction(j.at("direction").get<std::string>());
    m.coverage = j.at("values").get<std::vector<double>>();
    m.fingerprint = j.value("fingerprint", std::string{});
    m.trials.assign(m.coverage.size(), j.value("trials", 0U));
    if (m.resolution < 1 || m.coverage.size() != static_cast<std::size_t>(m.resolution) * m.resolution) {
        throw std::invalid_argument("map values do not match its resolution");
    }
    return m;
}

PlanningService::PlanningService(ServiceOptions options) : options_{std::move(options)}
{
    id_salt_ = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}() ^
               static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count());
    if (!options_.data_dir.empty()) {
        load();
    }
    unsigned n = options_.job_workers != 0 ? options_.job_workers : std::max(1U, std::thread::hardware_concurrency());
    for (unsigned w = 0; w < n; ++w) {
        workers_.emplace_back([this] { worker_loop(); });
    }
}

PlanningService::~PlanningService()
{
    {
        std::lock_guard lock{mutex_};
        stopping_ = true;
        for (auto& [id, job] : jobs_) {
            job->cancel = true;
        }
    }
    changed_.notify_all();
    workers_.clear();
}

std::string PlanningService::new_id(const char* prefix)
{
    for (;;) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%012llx", prefix,
                      static_cast<unsigned long long>(rng::mix64(id_salt_ ^ ++id_counter_) >> 16));
        std::string id = buf;
        if (!scenarios_.contains(id) && !jobs_.contains(id)) {
            return id;
        }
    }
}

void PlanningService::touch(Scenario& s)
{
    ++s.revision;
    s.modified = now_iso();
    persist(s);
}

PlanningService::Scenario& PlanningService::scenario_locked(const std::string& id)
{
    auto it = scenarios_.find(id);
    if (it == scenarios_.end()) {
        throw ApiError(404, "unknown scenario '" + id + "'");
    }
    return it->second;
}

const PlanningService::Scenario& PlanningService::scenario_locked(const std::string& id) const
{
    return const_cast<PlanningService*>(this)->scenario_locked(id);
}

std::shared_ptr<PlanningService::Job> PlanningService::job_locked(const std::string& id) const
{
    auto it = jobs_.find(id);
    if (it == jobs_.end()) {
        throw ApiError(404, "unknown job '" + id + "'");
    }
    return it->second;
}

json PlanningService::record_json(const Scenario& s) const
{
    const Deployment d = deployment_of(s.config, {});
    return {{"id", s.id},
            {"revision", s.revision},
            {"created", s.created},
            {"modified", s.modified},
            {"config", to_json(s.config)},
            {"bs", points_json(s.bs)},
            {"bs_count", s.bs.size()},
            {"macro_isd_km", macro_isd_km},
            {"macro_sites", points_json(d.macro_grid->site_centers)}};
}

json PlanningService::job_json(const Job& job) const
{
    json j{{"id", job.id},
           {"job_id", job.id},
           {"scenario_id", job.scenario_id},
           {"revision", job.revision},
           {"direction", to_string(job.config.direction)},
           {"resolution", job.config.resolution},
           {"trials", job.config.trials},
           {"created", job.created},
           {"status", to_string(job.status)},
           {"progress", job.status == JobStatus::Done ? 1.0 : job.progress.load()}};
    if (job.status == JobStatus::Failed) {
        j["error"] = job.error;
    }
    return j;
}

json PlanningService::create_scenario(const json& body)
{
    ScenarioConfig config = apply_json(body);
    config.validate();
    Scenario s;
    s.config = config;
    s.bs = make_deployment(config).bs_positions;
    s.created = s.modified = now_iso();
    std::lock_guard lock{mutex_};
    s.id = new_id("s-");
    persist(s);
    auto [it, inserted] = scenarios_.emplace(s.id, std::move(s));
    return record_json(it->second);
}

json PlanningService::get_scenario(const std::string& id) const
{
    std::lock_guard lock{mutex_};
    return record_json(scenario_locked(id));
}

json PlanningService::list_scenarios() const
{
    std::lock_guard lock{mutex_};
    json a = json::array();
    for (const auto& [id, s] : scenarios_) {
        a.push_back({{"id", id}, {"revision", s.revision}, {"bs_count", s.bs.size()}, {"modified", s.modified}});
    }
    return a;
}

void PlanningService::delete_scenario(const std::string& id)
{
    std::lock_guard lock{mutex_};
    scenario_locked(id);
    scenarios_.erase(id);
    if (!options_.data_dir.empty()) {
        std::filesystem::remove(options_.data_dir / "scenarios" / (id + ".json"));
    }
}

json PlanningService::add_bs(const std::string& id, const json& point)
{
    if (!point.is_object() || !point.contains("x_km") || !point.contains("y_km") || !point["x_km"].is_number() ||
        !point["y_km"].is_number()) {
        throw ApiError(400, "expected {\"x_km\": number, \"y_km\": number}", "x_km");
    }
    const Point2D p{point["x_km"].get<double>(), point["y_km"].get<double>()};
    std::lock_guard lock{mutex_};
    Scenario& s = scenario_locked(id);
    if (!s.config.region().contains(p)) {
        throw ApiError(422, "point lies outside the region", "x_km");
    }
    s.bs.push_back(p);
    touch(s);
    json r = record_json(s);
    r["index"] = s.bs.size() - 1;
    return r;
}

json PlanningService::remove_bs(const std::string& id, std::size_t index)
{
    std::lock_guard lock{mutex_};
    Scenario& s = scenario_locked(id);
    if (index >= s.bs.size()) {
        throw ApiError(404, "no base station at index " + std::to_string(index));
    }
    if (s.bs.size() == 1) {
        throw ApiError(409, "cannot remove the last base station");
    }
    s.bs.erase(s.bs.begin() + static_cast<std::ptrdiff_t>(index));
    touch(s);
    return record_json(s);
}

json PlanningService::submit(const std::string& scenario_id, const json& request)
{
    if (!request.is_object()) {
        throw ApiError(400, "expected a JSON object", "body");
    }
    std::lock_guard lock{mutex_};
    const Scenario& s = scenario_locked(scenario_id);
    ScenarioConfig config = s.config;
    for (const auto& [key, value] : request.items()) {
        if (key == "direction") {
            if (!value.is_string()) {
                throw ConfigError(key, "expected \"dl\" or \"ul\"");
            }
            config.direction = parse_direction(value.get<std::string>());
        } else if (key == "resolution" || key == "trials") {
            if (!value.is_number_integer()) {
                throw ConfigError(key, "expected an integer");
            }
            (key == "resolution" ? config.resolution : config.trials) = value.get<int>();
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    config.validate();

    auto job = std::make_shared<Job>();
    job->id = new_id("j-");
    job->scenario_id = s.id;
    job->revision = s.revision;
    job->config = config;
    job->deployment = deployment_of(config, s.bs);
    job->created = now_iso();
    jobs_.emplace(job->id, job);
    queue_.push_back(job);
    changed_.notify_all();
    return job_json(*job);
}

json PlanningService::job_status(const std::string& job_id) const
{
    std::lock_guard lock{mutex_};
    return job_json(*job_locked(job_id));
}

CoverageMap PlanningService::job_result(const std::string& job_id) const
{
    std::lock_guard lock{mutex_};
    const auto job = job_locked(job_id);
    switch (job->status) {
    case JobStatus::Done:
        return *job->result;
    case JobStatus::Cancelled:
        throw ApiError(410, "job was cancelled");
    case JobStatus::Failed:
        throw ApiError(409, "job failed: " + job->error);
    default:
        throw ApiError(409, "job is " + std::string{to_string(job->status)});
    }
}

json PlanningService::cancel_job(const std::string& job_id)
{
    std::lock_guard lock{mutex_};
    const auto job = job_locked(job_id);
    if (job->status == JobStatus::Queued) {
        std::erase(queue_, job);
        job->status = JobStatus::Cancelled;
        persist(*job);
        changed_.notify_all();
    } else if (job->status == JobStatus::Running) {
        job->cancel = true;
    }
    return job_json(*job);
}

DiffMap PlanningService::diff_jobs(const std::string& a, const std::string& b) const
{
    const CoverageMap ma = job_result(a);
    const CoverageMap mb = job_result(b);
    try {
        return diff(ma, mb);
    } catch (const std::invalid_argument& e) {
        throw ApiError(409, e.what());
    }
}

JobStatus PlanningService::wait(const std::string& job_id, std::chrono::milliseconds timeout) const
{
    std::unique_lock lock{mutex_};
    const auto job = job_locked(job_id);
    changed_.wait_for(lock, timeout, [&] { return finished(job->status); });
    return job->status;
}

void PlanningService::worker_loop()
{
    for (;;) {
        std::shared_ptr<Job> job;
        {
            std::unique_lock lock{mutex_};
            auto runnable = [&] {
                return std::find_if(queue_.begin(), queue_.end(),
                                    [&](const auto& j) { return !busy_scenarios_.contains(j->scenario_id); });
            };
            changed_.wait(lock, [&] { return stopping_ || runnable() != queue_.end(); });
            if (stopping_) {
                return;
            }
            auto it = runnable();
            job = *it;
            queue_.erase(it);
            job->status = JobStatus::Running;
            busy_scenarios_.insert(job->scenario_id);
        }
        run_job(job);
    }
}

void PlanningService::run_job(const std::shared_ptr<Job>& job)
{
    std::optional<CoverageMap> result;
    JobStatus status = JobStatus::Done;
    std::string error;
    try {
        const Simulator sim{job->config, job->deployment};
        ScanOptions opt;
        opt.workers = options_.engine_workers;
        opt.cancel = &job->cancel;
        opt.progress = [&job](std::size_t done, std::size_t total) {
            const double v = static_cast<double>(done) / static_cast<double>(total);
            double cur = job->progress.load();
            while (v > cur && !job->progress.compare_exchange_weak(cur, v)) {
            }
        };
        result = sim.scan_grid(opt);
    } catch (const ScanCancelled&) {
        status = JobStatus::Cancelled;
    } catch (const std::exception& e) {
        status = JobStatus::Failed;
        error = e.what();
    }
    std::lock_guard lock{mutex_};
    if (status == JobStatus::Done) {
        job->result = std::move(result);
        job->progress = 1.0;
    }
    job->status = status;
    job->error = error;
    busy_scenarios_.erase(job->scenario_id);
    try {
        persist(*job);
    } catch (const std::exception& e) {
        std::cerr << "udnsim-server: " << e.what() << "\n";
    }
    changed_.notify_all();
}

void PlanningService::persist(const Scenario& s) const
{
    if (options_.data_dir.empty()) {
        return;
    }
    json j{{"id", s.id},           {"revision", s.revision},      {"created", s.created},
           {"modified", s.modified}, {"config", to_json(s.config)}, {"bs", points_json(s.bs)}};
    write_atomically(options_.data_dir / "scenarios" / (s.id + ".json"), j.dump(1));
}

void PlanningService::persist(const Job& job) const
{
    if (options_.data_dir.empty() || !finished(job.status)) {
        return;
    }
    json j = job_json(job);
    j["config"] = to_json(job.config);
    j["bs"] = points_json(job.deployment.bs_positions);
    const auto dir = options_.data_dir / "jobs";
    if (job.result) {
        j["result"] = map_to_json(*job.result);
        write_atomically(dir / (job.id + ".png"), write_png(*job.result));
    }
    write_atomically(dir / (job.id + ".json"), j.dump());
}

void PlanningService::load()
{
    namespace fs = std::filesystem;
    auto each_json = [](const fs::path& dir, auto&& fn) {
        if (!fs::is_directory(dir)) {
            return;
        }
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() != ".json") {
                continue;
            }
            try {
                fn(read_json(entry.path()));
            } catch (const std::exception& e) {
                std::cerr << "udnsim-server: skipping " << entry.path() << ": " << e.what() << "\n";
            }
        }
    };
    each_json(options_.data_dir / "scenarios", [&](const json& j) {
        Scenario s;
        s.id = j.at("id").get<std::string>();
        s.revision = j.at("revision").get<std::uint64_t>();
        s.created = j.value("created", std::string{});
        s.modified = j.value("modified", std::string{});
        s.config = apply_json(j.at("config"));
        s.bs = points_from_json(j.at("bs"));
        scenarios_.emplace(s.id, std::move(s));
    });
    each_json(options_.data_dir / "jobs", [&](const json& j) {
        auto job = std::make_shared<Job>();
        job->id = j.at("id").get<std::string>();
        job->scenario_id = j.at("scenario_id").get<std::string>();
        job->revision = j.at("revision").get<std::uint64_t>();
        job->config = apply_json(j.at("config"));
        job->deployment = deployment_of(job->config, points_from_json(j.at("bs")));
        job->created = j.value("created", std::string{});
        job->status = parse_status(j.at("status").get<std::string>());
        job->progress = j.value("progress", 0.0);
        job->error = j.value("error", std::string{});
        if (j.contains("result")) {
            job->result = map_from_json(j.at("result"));
        }
        if (job->status == JobStatus::Done && !job->result) {
            job->status = JobStatus::Failed;
            job->error = "stored result missing";
        }
        jobs_.emplace(job->id, job);
    });
}

void PlanningService::mount(httplib::Server& server)
{
    using httplib::Request;
    using httplib::Response;

    auto send_json = [](Response& res, const json& body, int status = 200) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    };
    auto guard = [send_json](auto&& handler) {
        return [handler, send_json](const Request& req, Response& res) {
            try {
                handler(req, res);
            } catch (const ApiError& e) {
                json body{{"error", e.what()}};
                if (!e.field().empty()) {
                    body["field"] = e.field();
                }
                send_json(res, body, e.status());
            } catch (const ConfigError& e) {
                send_json(res, {{"error", e.what()}, {"field", e.field()}}, 400);
            } catch (const json::exception& e) {
                send_json(res, {{"error", std::string{"malformed JSON: "} + e.what()}, {"field", "body"}}, 400);
            } catch (const std::exception& e) {
                send_json(res, {{"error", e.what()}}, 500);
            }
        };
    };
    auto body_json = [](const Request& req) { return req.body.empty() ? json::object() : json::parse(req.body); };
    auto query = [](const Request& req, const char* name) {
        if (!req.has_param(name)) {
            throw ApiError(400, std::string{"missing query parameter '"} + name + "'", name);
        }
        return req.get_param_value(name);
    };

    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const Request&, Response& res) { res.status = 204; });

    server.Get("/health", [send_json](const Request&, Response& res) { send_json(res, {{"status", "ok"}}); });

    server.Post("/scenarios", guard([=, this](const Request& req, Response& res) {
        send_json(res, create_scenario(body_json(req)), 201);
    }));
    server.Get("/scenarios", guard([=, this](const Request&, Response& res) { send_json(res, list_scenarios()); }));
    server.Get(R"(/scenarios/([^/]+))", guard([=, this](const Request& req, Response& res) {
        send_json(res, get_scenario(req.matches[1]));
    }));
    server.Delete(R"(/scenarios/([^/]+))", guard([=, this](const Request& req, Response& res) {
        delete_scenario(req.matches[1]);
        send_json(res, {{"deleted", req.matches[1]}});
    }));
    server.Post(R"(/scenarios/([^/]+)/bs)", guard([=, this](const Request& req, Response& res) {
        send_json(res, add_bs(req.matches[1], body_json(req)));
    }));
    server.Delete(R"(/scenarios/([^/]+)/bs/(\d+))", guard([=, this](const Request& req, Response& res) {
        std::size_t index = 0;
        try {
            index = std::stoull(req.matches[2]);
        } catch (const std::exception&) {
            throw ApiError(404, "no base station at index " + std::string{req.matches[2]});
        }
        send_json(res, remove_bs(req.matches[1], index));
    }));
    server.Post(R"(/scenarios/([^/]+)/compute)", guard([=, this](const Request& req, Response& res) {
        send_json(res, submit(req.matches[1], body_json(req)), 202);
    }));

    server.Get(R"(/jobs/([^/]+))", guard([=, this](const Request& req, Response& res) {
        send_json(res, job_status(req.matches[1]));
    }));
    server.Delete(R"(/jobs/([^/]+))", guard([=, this](const Request& req, Response& res) {
        send_json(res, cancel_job(req.matches[1]));
    }));
    server.Get(R"(/jobs/([^/]+)/result)", guard([=, this](const Request& req, Response& res) {
        send_json(res, map_to_json(job_result(req.matches[1])));
    }));
    server.Get(R"(/jobs/([^/]+)/result\.png)", guard([this](const Request& req, Response& res) {
        res.set_content(write_png(job_result(req.matches[1])), "image/png");
    }));
    server.Get(R"(/jobs/([^/]+)/result\.csv)", guard([this](const Request& req, Response& res) {
        res.set_content(write_csv(job_result(req.matches[1])), "text/csv");
    }));

    server.Get("/diff", guard([=, this](const Request& req, Response& res) {
        const std::string a = query(req, "a");
        const std::string b = query(req, "b");
        const DiffMap d = diff_jobs(a, b);
        send_json(res, {{"a", a},
                        {"b", b},
                        {"fingerprint_a", d.fingerprint_a},
                        {"fingerprint_b", d.fingerprint_b},
                        {"resolution", d.resolution},
                        {"side_km", d.side_km},
                        {"max_abs", d.max_abs()},
                        {"values", d.values}});
    }));
    server.Get("/diff.png", guard([=, this](const Request& req, Response& res) {
        const DiffMap d = diff_jobs(query(req, "a"), query(req, "b"));
        const double scale = d.max_abs() > 0.0 ? d.max_abs() : 1.0;
        res.set_content(write_diff_png(d, scale), "image/png");
    }));
}

} // namespace udnsim
