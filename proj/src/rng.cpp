#include "globalnull/rng.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace globalnull {

namespace {

constexpr std::uint32_t philox_m0 = 0xD2511F53u;
constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += philox_w0;
            k[1] += philox_w1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(philox_m0, c[0], hi0, lo0);
        mulhilo(philox_m1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

namespace {

struct ObserverSlot {
    StreamObserver observer;
    void* context;
};
std::atomic<const ObserverSlot*> observer_slot{nullptr};

} // namespace

void set_stream_observer(StreamObserver observer, void* context) {
    // Slots are leaked on purpose: a stream on another thread may still be
    // reading the previous one.
    observer_slot.store(observer ? new ObserverSlot{observer, context} : nullptr);
}

PhiloxStream::PhiloxStream(const StreamKey& key): key_(key) {
    if (key.lane > max_lane) {
        throw std::invalid_argument("stream lane exceeds 24 bits");
    }
    if (const ObserverSlot* slot = observer_slot.load(std::memory_order_acquire)) slot->observer(key, slot->context);
    philox_key_ = {static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)};
}

// Counter layout: word 0 is the block index within the stream, words 1-2
// the replicate, word 3 packs purpose (high 8 bits) and lane (low 24 bits).
void PhiloxStream::refill() {
    const PhiloxCounter counter{
        block_,
        static_cast<std::uint32_t>(key_.replicate),
        static_cast<std::uint32_t>(key_.replicate >> 32),
        (static_cast<std::uint32_t>(key_.purpose) << 24) | key_.lane,
    };
    if (++block_ == 0) {
        throw std::overflow_error("Philox stream exhausted");
    }
    buffer_ = philox4x32_10(counter, philox_key_);
    buffered_ = 4;
}

std::uint64_t PhiloxStream::next_u64() {
    if (buffered_ < 2) {
        refill();
    }
    const int i = 4 - buffered_;
    buffered_ -= 2;
    return (static_cast<std::uint64_t>(buffer_[i]) << 32) | buffer_[i + 1];
}

double PhiloxStream::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double PhiloxStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void PhiloxStream::fill_normal(std::span<double> out) {
    for (double& v: out) v = normal();
}

} // namespace globalnull
