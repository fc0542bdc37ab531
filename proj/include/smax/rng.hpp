#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace smax {

/*
 * Counter-based splittable random streams.
 *
 * A stream is (stream_id, counter); the n-th output is
 * finalize(stream_id + n * GOLDEN) with the splitmix64 finalizer, so draws
 * are a pure function of (stream_id, n) and substreams can be handed to
 * parallel workers in any order without affecting results.
 *
 * Derivation: root id = finalize(master + GOLDEN); child id =
 * finalize(parent_id + GOLDEN * (tag + 1)). Both maps are bijective in each
 * argument, so sibling streams always have distinct ids.
 */
class RngStream {
public:
    static constexpr std::uint64_t GOLDEN = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t finalize(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

    explicit RngStream(std::uint64_t master_seed)
        : master_seed_(master_seed), stream_id_(finalize(master_seed + GOLDEN)) {}

    RngStream derive(std::uint64_t tag) const {
        RngStream child(*this);
        child.stream_id_ = finalize(stream_id_ + GOLDEN * (tag + 1));
        child.counter_ = 0;
        return child;
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        ++counter_;
        return finalize(stream_id_ + counter_ * GOLDEN);
    }

    /* Uniform on the open interval (0,1): 53 bits, offset by half an ulp. */
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    /* Box-Muller pair; always consumes exactly two uniforms. */
    std::pair<double, double> normal_pair() {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;
};

}  // namespace smax
