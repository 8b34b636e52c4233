#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace globalnull {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

inline constexpr std::string_view generator_id = "philox4x32-10/box-muller/v1";

// What a stream is used for. Calibration and power replicates draw from
// disjoint purposes so they can never share a stream.
enum class StreamPurpose : std::uint8_t {
    Null = 1,
    Calibration = 2,
    Power = 3,
    Validation = 4,
    Sampling = 5,
    Test = 6,
};

// Identifies one independent stream: (seed, purpose, replicate, lane).
// Lanes separate sub-streams inside a replicate (noise vs. signal means).
struct StreamKey {
    std::uint64_t seed = 0;
    StreamPurpose purpose = StreamPurpose::Null;
    std::uint64_t replicate = 0;
    std::uint32_t lane = 0;

    auto operator<=>(const StreamKey&) const = default;
};

inline constexpr std::uint32_t max_lane = (1u << 24) - 1;

// Process-wide audit hook, called with the key of every stream constructed.
// Used to check which streams a computation touches; nullptr removes it.
using StreamObserver = void (*)(const StreamKey& key, void* context);
void set_stream_observer(StreamObserver observer, void* context);

// Sequential reader over the Philox output for one StreamKey. Satisfies
// UniformRandomBitGenerator so it can drive <random> adaptors if needed.
class PhiloxStream {
public:
    using result_type = std::uint64_t;

    explicit PhiloxStream(const StreamKey& key);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    // Standard normal via Box-Muller; draws come in pairs.
    double normal();

    void fill_normal(std::span<double> out);

    const StreamKey& key() const { return key_; }

private:
    void refill();

    StreamKey key_;
    PhiloxKey philox_key_{};
    std::uint32_t block_ = 0;
    PhiloxCounter buffer_{};
    int buffered_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace globalnull
