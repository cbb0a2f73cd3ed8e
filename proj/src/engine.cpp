#include "udnsim/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>
#include <thread>

namespace udnsim {

namespace {

constexpr std::uint64_t deployment_stream = 0xd3b1'0000'0000'0001ULL;

/// Adapts RandomStream to the standard URBG interface.
struct StreamUrbg {
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    RandomStream* stream;
    result_type operator()() { return stream->next_bits(); }
};

} // namespace

void ScenarioConfig::validate() const
{
    if (!(side_km > 0.0) || !std::isfinite(side_km)) {
        throw ConfigError("side_km", "must be positive");
    }
    if (!(lambda_bs >= 0.0) || !std::isfinite(lambda_bs)) {
        throw ConfigError("lambda_bs", "must be a finite non-negative density");
    }
    if (std::llround(lambda_bs * side_km * side_km) < 1) {
        throw ConfigError("lambda_bs", "deployment would contain no base station");
    }
    if (!(rho_ue >= 0.0) || !std::isfinite(rho_ue)) {
        throw ConfigError("rho_ue", "must be a finite non-negative density");
    }
    if (!(ue_antenna_height_m >= 0.0)) {
        throw ConfigError("ue_antenna_height_m", "must be non-negative");
    }
    if (!(bs_antenna_height_m >= ue_antenna_height_m) || !std::isfinite(bs_antenna_height_m)) {
        throw ConfigError("bs_antenna_height_m", "must be at least the UE antenna height");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("gamma", "must be positive");
    }
    if (trials < 1) {
        throw ConfigError("trials", "must be at least 1");
    }
    if (resolution < 1) {
        throw ConfigError("resolution", "must be at least 1");
    }
    if (ic_depth < 0) {
        throw ConfigError("ic_depth", "must be non-negative");
    }
    if (cutoff_km && !(*cutoff_km > 0.0)) {
        throw ConfigError("cutoff_km", "must be positive when set");
    }
    if (direction == Direction::Uplink && duplex != DuplexMode::DynamicTdd) {
        throw ConfigError("direction", "uplink maps need duplex = tdd");
    }
}

Measurement ScenarioConfig::measurement() const
{
    return {scheduler, imc_enabled, duplex, direction, ic_depth, ul_power, ic_rank_by_mean_power, gamma};
}

Deployment make_deployment(const ScenarioConfig& config)
{
    const Region region = config.region();
    RandomStream stream{rng::derive(rng::seed_key(config.seed), deployment_stream)};
    Deployment deployment = deploy_bs(region, config.lambda_bs, stream);
    deployment.bs_antenna_height_m = config.bs_antenna_height_m;
    deployment.ue_antenna_height_m = config.ue_antenna_height_m;
    return deployment;
}

double CoverageMap::mean() const
{
    if (coverage.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double v : coverage) {
        sum += v;
    }
    return sum / static_cast<double>(coverage.size());
}

Point2D pixel_center(int i, int j, int resolution, double side_km)
{
    const double step = side_km / resolution;
    return {(i + 0.5) * step, (j + 0.5) * step};
}

double coverage_fraction(std::span<const double> sinr, double gamma)
{
    if (sinr.empty()) {
        return 0.0;
    }
    const auto hits = std::count_if(sinr.begin(), sinr.end(), [gamma](double s) { return s > gamma; });
    return static_cast<double>(hits) / static_cast<double>(sinr.size());
}

struct Simulator::Background {
    std::uint64_t trial = 0;
    TrialDraws draws{0};
    std::vector<Point2D> ues;
    AssociationResult association;
};

struct Simulator::CellPlan {
    std::vector<std::uint32_t> imc_active;
    std::span<const std::uint32_t> active;
    std::vector<CellSchedule> schedule;
    std::vector<double> tx_mw;
    std::vector<double> fading;
};

Simulator::Simulator(ScenarioConfig config, Deployment deployment)
    : config_{std::move(config)}, deployment_{std::move(deployment)}, associator_{deployment_, config_.channel}
{
    config_.validate();
    all_bs_.resize(deployment_.bs_count());
    for (std::uint32_t b = 0; b < all_bs_.size(); ++b) {
        all_bs_[b] = b;
    }
}

void Simulator::realize(std::uint64_t trial, Background& bg) const
{
    bg.trial = trial;
    bg.draws = TrialDraws{rng::background_key(config_.seed, trial)};
    bg.ues.clear();
    if (!config_.full_load) {
        const Region& region = deployment_.region;
        std::size_t count = expected_count(region, config_.rho_ue);
        if (config_.poisson_ue_count) {
            auto stream = bg.draws.ue_count_stream();
            StreamUrbg urbg{&stream};
            std::poisson_distribution<std::size_t> poisson(config_.rho_ue * region.area_km2());
            count = config_.rho_ue > 0.0 ? poisson(urbg) : 0;
        }
        auto stream = bg.draws.ue_drop_stream();
        drop_uniform_points(region, count, stream, bg.ues);
    }
    associator_.associate(bg.ues, bg.draws, bg.association);
}

void Simulator::plan(const Background& bg, const Measurement& m, CellPlan& out) const
{
    const auto& assoc = bg.association;
    const bool tdd = m.duplex == DuplexMode::DynamicTdd;
    if (config_.full_load || !m.imc_enabled) {
        out.active = all_bs_;
    } else {
        out.imc_active.clear();
        for (std::uint32_t b = 0; b < assoc.bs_count(); ++b) {
            if (assoc.attached_offsets[b + 1] != assoc.attached_offsets[b]) {
                out.imc_active.push_back(b);
            }
        }
        out.active = out.imc_active;
    }
    out.schedule.resize(deployment_.bs_count());
    out.tx_mw.resize(deployment_.bs_count());
    for (const std::uint32_t c : out.active) {
        const auto attached = assoc.attached(c);
        CellSchedule& cell = out.schedule[c];
        out.tx_mw[c] = 0.0;
        if (attached.empty()) {
            cell = CellSchedule{};
            continue;
        }
        if (m.scheduler == SchedulerKind::ProportionalFair) {
            out.fading.clear();
            for (const auto u : attached) {
                out.fading.push_back(fading_from_uniform(bg.draws.link_fading_uniform(u, c)));
            }
        }
        cell.scheduled_ue = schedule_cell(attached, m.scheduler, out.fading, bg.draws.schedule(c));
        cell.direction = tdd ? direction_from_uniform(bg.draws.direction(cell.scheduled_ue)) : Direction::Downlink;
        if (cell.direction == Direction::Uplink) {
            out.tx_mw[c] = ue_tx_power_mw(assoc.serving_path_loss_db[cell.scheduled_ue], m.ul_power, config_.power);
        }
    }
}

ProbeState Simulator::attach_probe(Point2D position, const ProbeDraws& draws, const ProbeLinks* links) const
{
    ProbeState probe;
    probe.position = position;
    probe.draws = &draws;
    probe.links = links;
    associator_.associate_one(position, draws.los_key(), probe.serving, probe.serving_path_loss_db,
                              probe.serving_is_los);
    return probe;
}

SinrSample Simulator::evaluate(const Background& bg, const CellPlan& plan, const ProbeState& probe,
                               const Measurement& m, std::vector<InterferenceTerm>& scratch,
                               double* signal_fading_out) const
{
    const std::uint32_t serving = probe.serving;
    double signal_fading = fading_from_uniform(probe.draws->link_fading_uniform(serving));
    if (m.scheduler == SchedulerKind::ProportionalFair) {
        for (const auto u : bg.association.attached(serving)) {
            signal_fading = std::max(signal_fading, fading_from_uniform(bg.draws.link_fading_uniform(u, serving)));
        }
    }
    if (signal_fading_out != nullptr) {
        *signal_fading_out = signal_fading;
    }

    TrialView view;
    view.deployment = &deployment_;
    view.model = config_.channel;
    view.power = config_.power;
    view.draws = &bg.draws;
    view.ue_positions = bg.ues;
    view.association = &bg.association;
    view.active_bs = plan.active;
    view.schedule = plan.schedule;
    view.scheduled_tx_mw = plan.tx_mw;
    view.ul_power = m.ul_power;
    view.cutoff_km = config_.cutoff_km;
    view.probe = probe;

    if (m.duplex == DuplexMode::DynamicTdd && m.direction == Direction::Uplink) {
        return ul_sinr(view, signal_fading, m.ic_depth, m.ic_rank_by_mean_power, scratch);
    }
    return dl_sinr(view, signal_fading, scratch);
}

SinrSample Simulator::run_trial(Point2D probe, std::uint64_t pixel, std::uint64_t trial, const Measurement& m) const
{
    return run_trial_snapshot(probe, pixel, trial, m).sample;
}

TrialSnapshot Simulator::run_trial_snapshot(Point2D probe_position, std::uint64_t pixel, std::uint64_t trial,
                                            const Measurement& m) const
{
    if (!deployment_.region.contains(probe_position)) {
        throw std::invalid_argument("probe outside region");
    }
    Background bg;
    realize(trial, bg);
    CellPlan cells;
    plan(bg, m, cells);
    const ProbeDraws draws{rng::probe_key(config_.seed, pixel, trial)};
    const ProbeState probe = attach_probe(probe_position, draws, nullptr);
    std::vector<InterferenceTerm> scratch;

    TrialSnapshot snap;
    snap.sample = evaluate(bg, cells, probe, m, scratch, &snap.probe_signal_fading);
    snap.ue_positions = bg.ues;
    snap.ue_positions.push_back(probe_position);
    snap.probe = static_cast<std::uint32_t>(bg.ues.size());

    // Fold the probe into the background association.
    auto& a = snap.association;
    a.serving_bs = bg.association.serving_bs;
    a.serving_bs.push_back(probe.serving);
    a.serving_path_loss_db = bg.association.serving_path_loss_db;
    a.serving_path_loss_db.push_back(probe.serving_path_loss_db);
    a.serving_is_los = bg.association.serving_is_los;
    a.serving_is_los.push_back(probe.serving_is_los ? 1 : 0);
    a.attached_offsets = bg.association.attached_offsets;
    for (std::size_t b = probe.serving + 1; b < a.attached_offsets.size(); ++b) {
        ++a.attached_offsets[b];
    }
    a.attached_list = bg.association.attached_list;
    a.attached_list.insert(a.attached_list.begin() + a.attached_offsets[probe.serving + 1] - 1, snap.probe);

    snap.active_bs.assign(cells.active.begin(), cells.active.end());
    if (!std::binary_search(snap.active_bs.begin(), snap.active_bs.end(), probe.serving)) {
        snap.active_bs.insert(std::upper_bound(snap.active_bs.begin(), snap.active_bs.end(), probe.serving),
                              probe.serving);
    }
    snap.schedule = cells.schedule;
    snap.schedule[probe.serving] = {snap.probe,
                                    m.duplex == DuplexMode::DynamicTdd ? m.direction : Direction::Downlink};
    return snap;
}

double Simulator::coverage_at(Point2D probe_position, std::uint64_t pixel, const Measurement& m) const
{
    if (!deployment_.region.contains(probe_position)) {
        throw std::invalid_argument("probe outside region");
    }
    ProbeLinks links;
    links.build(probe_position, deployment_, config_.channel);
    Background bg;
    CellPlan cells;
    std::vector<InterferenceTerm> scratch;
    std::uint64_t hits = 0;
    for (int t = 0; t < config_.trials; ++t) {
        const auto trial = static_cast<std::uint64_t>(t);
        realize(trial, bg);
        plan(bg, m, cells);
        const ProbeDraws draws{rng::probe_key(config_.seed, pixel, trial)};
        const ProbeState probe = attach_probe(probe_position, draws, &links);
        if (evaluate(bg, cells, probe, m, scratch).sinr > m.gamma) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / config_.trials;
}

namespace {

/// Runs task(k) for k in [0, n) on up to `workers` threads. The first
/// exception stops the remaining tasks and is rethrown.
template <class Task>
void parallel_for(std::size_t n, unsigned workers, Task&& task)
{
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n || failed.load()) {
                return;
            }
            try {
                task(k);
            } catch (...) {
                std::lock_guard lock{failure_mutex};
                if (!failure) {
                    failure = std::current_exception();
                }
                failed = true;
                return;
            }
        }
    };
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(run);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace

std::vector<CoverageMap> Simulator::scan(std::span<const Measurement> measurements, const ScanOptions& options) const
{
    const int res = config_.resolution;
    const auto total = static_cast<std::size_t>(res) * static_cast<std::size_t>(res);
    const auto n_meas = measurements.size();
    const auto trials = static_cast<std::size_t>(config_.trials);
    const double side = deployment_.region.side_km();
    std::vector<CoverageMap> maps(n_meas);
    for (std::size_t k = 0; k < n_meas; ++k) {
        maps[k].fingerprint = fingerprint(measurements[k]);
        maps[k].resolution = res;
        maps[k].side_km = side;
        maps[k].direction = measurements[k].direction;
        maps[k].coverage.assign(total, 0.0);
        maps[k].trials.assign(total, 0);
    }
    const unsigned workers =
        options.workers != 0 ? options.workers : std::max(1U, std::thread::hardware_concurrency());

    // Pixels are processed in tiles whose link tables fit the cache budget.
    // Within a tile every trial's background is realized once and reused by
    // all of the tile's pixels.
    const std::size_t table_bytes = std::max<std::size_t>(1, deployment_.bs_count()) * 4 * sizeof(double);
    const std::size_t tile_size = std::clamp<std::size_t>(options.cache_budget_bytes / table_bytes, 1, total);
    const std::size_t chunks_per_tile = std::min<std::size_t>(trials, std::max<std::size_t>(4U * workers, 16));
    const std::size_t chunk_len = (trials + chunks_per_tile - 1) / chunks_per_tile;
    const std::size_t n_chunks = (trials + chunk_len - 1) / chunk_len;

    std::vector<std::uint64_t> hits(total * n_meas, 0);
    std::vector<std::uint32_t> trials_done(total, 0);
    std::vector<ProbeLinks> tables;
    std::mutex merge_mutex;
    std::size_t done = 0;
    const std::size_t work_total = total * trials;
    std::atomic<bool> cancelled{false};
    auto cancel_requested = [&] {
        if (options.cancel != nullptr && options.cancel->load(std::memory_order_relaxed)) {
            cancelled = true;
        }
        return cancelled.load(std::memory_order_relaxed);
    };

    for (std::size_t tile_begin = 0; tile_begin < total && !cancelled; tile_begin += tile_size) {
        const std::size_t tile_n = std::min(tile_size, total - tile_begin);
        tables.resize(tile_n);
        parallel_for(tile_n, workers, [&](std::size_t q) {
            const std::size_t p = tile_begin + q;
            const int i = static_cast<int>(p % res);
            const int j = static_cast<int>(p / res);
            tables[q].build(pixel_center(i, j, res, side), deployment_, config_.channel);
        });

        parallel_for(n_chunks, workers, [&](std::size_t chunk) {
            const std::size_t t_begin = chunk * chunk_len;
            const std::size_t t_end = std::min(trials, t_begin + chunk_len);
            std::vector<std::uint64_t> local(tile_n * n_meas, 0);
            std::size_t local_trials = 0;
            Background bg;
            std::vector<CellPlan> plans(n_meas);
            std::vector<InterferenceTerm> scratch;
            for (std::size_t t = t_begin; t < t_end && !cancel_requested(); ++t) {
                realize(t, bg);
                for (std::size_t k = 0; k < n_meas; ++k) {
                    plan(bg, measurements[k], plans[k]);
                }
                for (std::size_t q = 0; q < tile_n; ++q) {
                    const ProbeDraws draws{rng::probe_key(config_.seed, tile_begin + q, t)};
                    const ProbeState probe = attach_probe(tables[q].probe, draws, &tables[q]);
                    for (std::size_t k = 0; k < n_meas; ++k) {
                        if (evaluate(bg, plans[k], probe, measurements[k], scratch).sinr > measurements[k].gamma) {
                            ++local[q * n_meas + k];
                        }
                    }
                }
                ++local_trials;
            }
            std::lock_guard lock{merge_mutex};
            for (std::size_t q = 0; q < tile_n; ++q) {
                trials_done[tile_begin + q] += static_cast<std::uint32_t>(local_trials);
                for (std::size_t k = 0; k < n_meas; ++k) {
                    hits[(tile_begin + q) * n_meas + k] += local[q * n_meas + k];
                }
            }
            done += local_trials * tile_n;
            if (options.progress && local_trials > 0) {
                options.progress(done, work_total);
            }
        });
    }

    std::vector<std::uint8_t> completed(total, 0);
    for (std::size_t p = 0; p < total; ++p) {
        completed[p] = trials_done[p] == trials ? 1 : 0;
        for (std::size_t k = 0; k < n_meas; ++k) {
            maps[k].trials[p] = trials_done[p];
            maps[k].coverage[p] =
                trials_done[p] == 0 ? 0.0 : static_cast<double>(hits[p * n_meas + k]) / trials_done[p];
        }
    }
    if (done < work_total) {
        throw ScanCancelled(std::move(maps), std::move(completed));
    }
    return maps;
}

CoverageMap Simulator::scan_grid(const ScanOptions& options) const
{
    const Measurement m = config_.measurement();
    return std::move(scan(std::span{&m, 1}, options).front());
}

std::string Simulator::fingerprint(const Measurement& m) const
{
    std::uint64_t h = rng::seed_key(config_.seed);
    auto feed = [&h](auto v) {
        std::uint64_t bits = 0;
        if constexpr (std::is_floating_point_v<decltype(v)>) {
            bits = std::bit_cast<std::uint64_t>(static_cast<double>(v));
        } else {
            bits = static_cast<std::uint64_t>(v);
        }
        h = rng::mix64(h ^ rng::mix64(bits + 0x9e3779b97f4a7c15ULL));
    };
    const auto& c = config_;
    feed(c.side_km);
    feed(c.lambda_bs);
    feed(c.rho_ue);
    feed(c.bs_antenna_height_m);
    feed(c.ue_antenna_height_m);
    feed(static_cast<int>(c.channel));
    feed(c.full_load);
    feed(c.trials);
    feed(c.resolution);
    feed(c.cutoff_km.value_or(-1.0));
    feed(c.poisson_ue_count);
    feed(c.power.bs_tx_dbm);
    feed(c.power.ue_max_tx_dbm);
    feed(c.power.noise_at_bs_dbm);
    feed(c.power.noise_at_ue_dbm);
    feed(static_cast<int>(m.scheduler));
    feed(m.imc_enabled);
    feed(static_cast<int>(m.duplex));
    feed(static_cast<int>(m.direction));
    feed(m.ic_depth);
    feed(static_cast<int>(m.ul_power));
    feed(m.ic_rank_by_mean_power);
    feed(m.gamma);
    for (const auto& p : deployment_.bs_positions) {
        feed(p.x_km);
        feed(p.y_km);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace udnsim
