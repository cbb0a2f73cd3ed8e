#pragma once

#include <cmath>
#include <cstdint>

namespace udnsim {

/// Counter-based random numbers.
///
/// Every draw is a pure function of a 64-bit key and a 64-bit counter, so
/// any trial, link or UE can be regenerated in isolation and in any order.
/// The mixing function is the SplitMix64 finalizer (Stafford "Mix13").
namespace rng {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// 64 random bits at position `counter` of the stream named by `key`.
constexpr std::uint64_t bits(std::uint64_t key, std::uint64_t counter) noexcept
{
    return mix64(key ^ mix64(counter + 0x9e3779b97f4a7c15ULL));
}

/// Child key `index` of `parent`.
constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t index) noexcept
{
    return mix64(bits(parent, index) + 0x632be59bd9b4e019ULL);
}

/// Maps 64 random bits to a double strictly inside (0, 1).
constexpr double to_open_unit(std::uint64_t x) noexcept
{
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

/// Root key of a simulation from the user-facing seed.
constexpr std::uint64_t seed_key(std::uint64_t seed) noexcept
{
    return mix64(seed ^ 0x5851f42d4c957f2dULL);
}

/// Key of everything in a trial except the probe: background UEs, their
/// links, schedules and BS-BS links. Shared by all pixels of a scan.
constexpr std::uint64_t background_key(std::uint64_t seed, std::uint64_t trial) noexcept
{
    return derive(derive(seed_key(seed), 0), trial);
}

/// Key of the probe's own links in the (pixel, trial) cell of a grid scan.
constexpr std::uint64_t probe_key(std::uint64_t seed, std::uint64_t pixel, std::uint64_t trial) noexcept
{
    return derive(derive(seed_key(seed), pixel + 1), trial);
}

/// Purposes of the keyed draws inside one trial. The layout of a draw's
/// counter is tag (4 bits) | a (30 bits) | b (30 bits).
enum class Tag : std::uint64_t {
    UeDrop = 1,       ///< sequential stream for background UE positions
    LinkLos = 2,      ///< UE a -> BS b LoS uniform
    LinkFading = 3,   ///< UE a -> BS b fading uniform
    BsBsLos = 4,      ///< BS a -> BS b LoS uniform
    BsBsFading = 5,   ///< BS a -> BS b fading uniform
    UeUeLos = 6,      ///< background UE a -> probe LoS uniform
    UeUeFading = 7,   ///< background UE a -> probe fading uniform
    Direction = 8,    ///< UE a TDD request
    Schedule = 9,     ///< round-robin pick of cell a
    UeCount = 10,     ///< Poisson background UE count
};

constexpr std::uint64_t counter(Tag tag, std::uint64_t a, std::uint64_t b = 0) noexcept
{
    return (static_cast<std::uint64_t>(tag) << 60) | ((a & 0x3fffffffULL) << 30) | (b & 0x3fffffffULL);
}

/// Uniform in (0,1) for a keyed draw.
constexpr double uniform(std::uint64_t key, Tag tag, std::uint64_t a, std::uint64_t b = 0) noexcept
{
    return to_open_unit(bits(key, counter(tag, a, b)));
}

} // namespace rng

/// Sequential view over a counter-based stream. Copying a stream forks it.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key, std::uint64_t start = 0) noexcept
        : key_{key}, position_{start}
    {
    }

    std::uint64_t next_bits() noexcept { return rng::bits(key_, position_++); }

    /// Uniform in (0,1).
    double uniform() noexcept { return rng::to_open_unit(next_bits()); }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t position() const noexcept { return position_; }

private:
    std::uint64_t key_;
    std::uint64_t position_;
};

/// Keyed background draws of one trial. BS-BS draws are symmetric in their
/// endpoints, UE -> BS draws are directed.
class TrialDraws {
public:
    explicit TrialDraws(std::uint64_t key) noexcept : key_{key} {}

    std::uint64_t key() const noexcept { return key_; }

    /// UE -> BS link draws are mix64(ue_key ^ bs_salt): one mix per link
    /// once the UE's key is known, which keeps association cheap.
    std::uint64_t ue_link_key(std::uint32_t ue, rng::Tag tag) const noexcept
    {
        return rng::bits(key_, rng::counter(tag, ue));
    }
    static constexpr std::uint64_t bs_salt(std::uint32_t bs) noexcept
    {
        return rng::mix64(static_cast<std::uint64_t>(bs) * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    }
    static constexpr double link_uniform(std::uint64_t ue_key, std::uint64_t salt) noexcept
    {
        return rng::to_open_unit(rng::mix64(ue_key ^ salt));
    }

    double link_los(std::uint32_t ue, std::uint32_t bs) const noexcept
    {
        return link_uniform(ue_link_key(ue, rng::Tag::LinkLos), bs_salt(bs));
    }
    double link_fading_uniform(std::uint32_t ue, std::uint32_t bs) const noexcept
    {
        return link_uniform(ue_link_key(ue, rng::Tag::LinkFading), bs_salt(bs));
    }
    double bs_bs_los(std::uint32_t a, std::uint32_t b) const noexcept
    {
        return rng::uniform(key_, rng::Tag::BsBsLos, a < b ? a : b, a < b ? b : a);
    }
    double bs_bs_fading_uniform(std::uint32_t a, std::uint32_t b) const noexcept
    {
        return rng::uniform(key_, rng::Tag::BsBsFading, a < b ? a : b, a < b ? b : a);
    }
    double direction(std::uint32_t ue) const noexcept { return rng::uniform(key_, rng::Tag::Direction, ue); }
    double schedule(std::uint32_t bs) const noexcept { return rng::uniform(key_, rng::Tag::Schedule, bs); }

    RandomStream ue_drop_stream() const noexcept
    {
        return RandomStream{key_, rng::counter(rng::Tag::UeDrop, 0, 0)};
    }
    RandomStream ue_count_stream() const noexcept
    {
        return RandomStream{key_, rng::counter(rng::Tag::UeCount, 0, 0)};
    }

private:
    std::uint64_t key_;
};

/// Draws of the probe's links in one (pixel, trial). UE -> BS draws use the
/// same salted construction as TrialDraws, UE-UE draws are keyed by the
/// background UE at the other end.
class ProbeDraws {
public:
    explicit ProbeDraws(std::uint64_t key) noexcept
        : key_{key},
          los_key_{rng::bits(key, rng::counter(rng::Tag::LinkLos, 0))},
          fading_key_{rng::bits(key, rng::counter(rng::Tag::LinkFading, 0))}
    {
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t los_key() const noexcept { return los_key_; }

    double link_los(std::uint32_t bs) const noexcept
    {
        return TrialDraws::link_uniform(los_key_, TrialDraws::bs_salt(bs));
    }
    double link_fading_uniform(std::uint32_t bs) const noexcept
    {
        return TrialDraws::link_uniform(fading_key_, TrialDraws::bs_salt(bs));
    }
    double ue_los(std::uint32_t ue) const noexcept { return rng::uniform(key_, rng::Tag::UeUeLos, ue); }
    double ue_fading_uniform(std::uint32_t ue) const noexcept
    {
        return rng::uniform(key_, rng::Tag::UeUeFading, ue);
    }

private:
    std::uint64_t key_;
    std::uint64_t los_key_;
    std::uint64_t fading_key_;
};

} // namespace udnsim
