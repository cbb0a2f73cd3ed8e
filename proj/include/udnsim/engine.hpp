#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "udnsim/association.hpp"
#include "udnsim/channel.hpp"
#include "udnsim/geometry.hpp"
#include "udnsim/mac.hpp"
#include "udnsim/sinr.hpp"

namespace udnsim {

/// Raised by ScenarioConfig::validate(); field() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_{std::move(field)}
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Everything that is measured at the probe on top of a shared trial
/// realization. Fields here consume no randomness of their own, so several
/// measurements can be evaluated on the same trials.
struct Measurement {
    SchedulerKind scheduler = SchedulerKind::RoundRobin;
    bool imc_enabled = true;
    DuplexMode duplex = DuplexMode::DownlinkOnly;
    Direction direction = Direction::Downlink;
    int ic_depth = 0;
    UlPowerMode ul_power = UlPowerMode::Fractional;
    bool ic_rank_by_mean_power = false;
    double gamma = 1.0;
};

struct ScenarioConfig {
    double side_km = 1.5;
    double lambda_bs = 50.0;   ///< BSs per km^2
    double rho_ue = 300.0;     ///< active UEs per km^2
    double bs_antenna_height_m = 1.5;
    double ue_antenna_height_m = 1.5;
    ChannelModel channel = ChannelModel::ThreeGppLosNlos;
    bool imc_enabled = true;
    bool full_load = false;    ///< every BS transmits, no background UEs
    SchedulerKind scheduler = SchedulerKind::RoundRobin;
    DuplexMode duplex = DuplexMode::DownlinkOnly;
    Direction direction = Direction::Downlink;
    int ic_depth = 0;
    UlPowerMode ul_power = UlPowerMode::Fractional;
    double gamma = 1.0;        ///< linear SINR threshold
    int trials = 10000;
    int resolution = 100;
    std::uint64_t seed = 1;
    std::optional<double> cutoff_km;
    bool poisson_ue_count = false;
    bool ic_rank_by_mean_power = false;
    PowerConstants power;

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;

    Measurement measurement() const;
    Region region() const { return Region{side_km}; }
};

/// Deterministic deployment for a config: round(lambda * area) BSs drawn
/// from the seed's deployment stream, plus the 500 m macro grid.
Deployment make_deployment(const ScenarioConfig& config);

struct CoverageMap {
    std::string fingerprint;
    int resolution = 0;
    double side_km = 0;
    Direction direction = Direction::Downlink;
    std::vector<double> coverage;       ///< row-major, index j * resolution + i
    std::vector<std::uint32_t> trials;  ///< per pixel

    double at(int i, int j) const { return coverage[static_cast<std::size_t>(j) * resolution + i]; }
    double mean() const;
};

/// Probe position of pixel (i, j): the cell centre.
Point2D pixel_center(int i, int j, int resolution, double side_km);

/// Everything one trial produced, for inspection and tests.
struct TrialSnapshot {
    std::vector<Point2D> ue_positions;  ///< background UEs, then the probe
    std::uint32_t probe = 0;
    AssociationResult association;      ///< probe included
    std::vector<std::uint32_t> active_bs;
    std::vector<CellSchedule> schedule;  ///< indexed by BS; valid for active BSs
    double probe_signal_fading = 1.0;
    SinrSample sample;
};

/// Progress in units of completed (pixel, trial) evaluations.
using ProgressSink = std::function<void(std::size_t done, std::size_t total)>;

struct ScanOptions {
    unsigned workers = 0;  ///< 0 = hardware concurrency
    ProgressSink progress;
    const std::atomic<bool>* cancel = nullptr;
    std::size_t cache_budget_bytes = std::size_t{64} << 20;  ///< per-pixel link tables held at once
};

/// Raised when a scan is cancelled. partial() holds every pixel's coverage
/// over the trials it finished (CoverageMap::trials); completed[p] != 0
/// marks pixels that ran all of them.
class ScanCancelled : public std::runtime_error {
public:
    ScanCancelled(std::vector<CoverageMap> partial, std::vector<std::uint8_t> completed)
        : std::runtime_error("scan cancelled"), partial_{std::move(partial)}, completed_{std::move(completed)}
    {
    }
    const std::vector<CoverageMap>& partial() const noexcept { return partial_; }
    const std::vector<std::uint8_t>& completed() const noexcept { return completed_; }

private:
    std::vector<CoverageMap> partial_;
    std::vector<std::uint8_t> completed_;
};

/// Monte Carlo engine for one (config, deployment) pair. Immutable after
/// construction; every method is safe to call concurrently.
///
/// A trial's background (UE drops, association, schedules, BS-BS links) is
/// keyed by the trial number alone and shared by every pixel; only the
/// probe's own links are keyed by (pixel, trial).
class Simulator {
public:
    Simulator(ScenarioConfig config, Deployment deployment);
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    const ScenarioConfig& config() const noexcept { return config_; }
    const Deployment& deployment() const noexcept { return deployment_; }

    /// One end-to-end realization for the draws of (pixel, trial).
    SinrSample run_trial(Point2D probe, std::uint64_t pixel, std::uint64_t trial, const Measurement& m) const;
    TrialSnapshot run_trial_snapshot(Point2D probe, std::uint64_t pixel, std::uint64_t trial,
                                     const Measurement& m) const;

    /// Fraction of config().trials trials with SINR > gamma at the probe.
    double coverage_at(Point2D probe, std::uint64_t pixel, const Measurement& m) const;

    /// Coverage maps of every measurement over the config's pixel grid.
    /// Results do not depend on the worker count or scheduling order.
    std::vector<CoverageMap> scan(std::span<const Measurement> measurements, const ScanOptions& options = {}) const;

    CoverageMap scan_grid(const ScanOptions& options = {}) const;

    std::string fingerprint(const Measurement& m) const;

private:
    struct Background;
    struct CellPlan;
    void realize(std::uint64_t trial, Background& bg) const;
    void plan(const Background& bg, const Measurement& m, CellPlan& out) const;
    ProbeState attach_probe(Point2D position, const ProbeDraws& draws, const ProbeLinks* links) const;
    SinrSample evaluate(const Background& bg, const CellPlan& plan, const ProbeState& probe, const Measurement& m,
                        std::vector<InterferenceTerm>& scratch, double* signal_fading = nullptr) const;

    ScenarioConfig config_;
    Deployment deployment_;
    Associator associator_;
    std::vector<std::uint32_t> all_bs_;
};

/// Fraction of samples with SINR strictly above gamma.
double coverage_fraction(std::span<const double> sinr, double gamma);

} // namespace udnsim
