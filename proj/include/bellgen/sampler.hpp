#pragma once

#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "bellgen/model.hpp"
#include "bellgen/rng.hpp"

namespace bellgen {

/// One emitted event before zero-filtering: the four outcome variables plus
/// the two setting selectors. The coordinate selected by eta_l among (a1, a2)
/// is nonzero and the other is zero; same for eta_r among (b1, b2).
struct SixVector {
    int8_t a1, a2, b1, b2;
    Setting eta_l, eta_r;
    bool operator==(const SixVector&) const = default;
};

/// A zero-filtered observable sample: outcomes a, b and setting indices i, j.
struct Record {
    Sign a, b;
    Setting i, j;
    bool operator==(const Record&) const = default;
};

/// Stream identity: every record sequence is a pure function of
/// (seed, shard_size, n, angles). Shard k of the stream covers records
/// [k*shard_size, (k+1)*shard_size) and is generated from shard_seed(seed, k).
struct SeedSpec {
    uint64_t seed = 42;
    uint64_t shard_size = 65536;
};

/// Draws elementary events by inverse CDF over the 16 atoms in canonical
/// order, consuming exactly one uniform deviate per event.
class OmegaSampler {
public:
    explicit OmegaSampler(const Measure& measure) {
        double cum = 0.0;
        for (int k = 0; k < kAtomCount; ++k) {
            cum += measure.weight_at(k);
            cdf_[static_cast<size_t>(k)] = cum;
            if (measure.weight_at(k) > 0.0) last_positive_ = k;
        }
    }

    OmegaPoint sample(Xoshiro256ss& rng) const {
        const double u = rng.next_unit();
        for (int k = 0; k < kAtomCount; ++k) {
            if (u < cdf_[static_cast<size_t>(k)]) {
                return OmegaPoint::from_atom(k);
            }
        }
        // u fell into the trailing rounding gap below total mass 1.
        return OmegaPoint::from_atom(last_positive_);
    }

private:
    std::array<double, kAtomCount> cdf_{};
    int last_positive_ = kAtomCount - 1;
};

inline OmegaPoint sample_omega(Xoshiro256ss& rng, const Measure& measure) {
    return OmegaSampler(measure).sample(rng);
}

inline SixVector to_six_vector(const OmegaPoint& omega) {
    const VariableValues v = evaluate_variables(omega);
    return SixVector{static_cast<int8_t>(v.a1), static_cast<int8_t>(v.a2),
                     static_cast<int8_t>(v.b1), static_cast<int8_t>(v.b2),
                     v.eta_l, v.eta_r};
}

/// Drops the zero coordinates of a six-vector, keeping the selected outcomes
/// and the setting indices. Rejects vectors whose zero pattern contradicts
/// their selectors.
inline Record filter_record(const SixVector& v) {
    const int left_sel = v.eta_l == Setting::one ? v.a1 : v.a2;
    const int left_other = v.eta_l == Setting::one ? v.a2 : v.a1;
    const int right_sel = v.eta_r == Setting::one ? v.b1 : v.b2;
    const int right_other = v.eta_r == Setting::one ? v.b2 : v.b1;
    if (left_sel == 0 || left_other != 0 || right_sel == 0 || right_other != 0) {
        throw malformed_vector_error("six-vector zero pattern contradicts its selectors");
    }
    return Record{sign_from_int(left_sel), sign_from_int(right_sel), v.eta_l, v.eta_r};
}

/// Inverse of filter_record: a record determines its six-vector completely.
inline SixVector reconstruct_six_vector(const Record& r) {
    const int8_t a = static_cast<int8_t>(as_int(r.a));
    const int8_t b = static_cast<int8_t>(as_int(r.b));
    return SixVector{static_cast<int8_t>(r.i == Setting::one ? a : 0),
                     static_cast<int8_t>(r.i == Setting::one ? 0 : a),
                     static_cast<int8_t>(r.j == Setting::one ? b : 0),
                     static_cast<int8_t>(r.j == Setting::one ? 0 : b),
                     r.i, r.j};
}

namespace detail {

inline void fill_shard(std::vector<Record>& out, const OmegaSampler& sampler,
                       const SeedSpec& seeds, uint64_t shard, uint64_t n) {
    const uint64_t begin = shard * seeds.shard_size;
    const uint64_t end = std::min(n, begin + seeds.shard_size);
    Xoshiro256ss rng(shard_seed(seeds.seed, shard));
    for (uint64_t m = begin; m < end; ++m) {
        out[m] = filter_record(to_six_vector(sampler.sample(rng)));
    }
}

} // namespace detail

/// Generates exactly n records, deterministically in (seed, shard_size, n,
/// angles). Shards are independent streams concatenated in index order, so
/// any worker count yields the identical sequence.
inline std::vector<Record> generate_stream(const SeedSpec& seeds, uint64_t n,
                                           const AngleConfig& angles, unsigned workers = 1) {
    if (seeds.shard_size == 0) {
        throw error("shard_size must be >= 1");
    }
    const OmegaSampler sampler(build_measure(angles));
    std::vector<Record> out(n, Record{Sign::plus, Sign::plus, Setting::one, Setting::one});
    const uint64_t shards = n == 0 ? 0 : (n + seeds.shard_size - 1) / seeds.shard_size;
    if (workers <= 1 || shards <= 1) {
        for (uint64_t k = 0; k < shards; ++k) {
            detail::fill_shard(out, sampler, seeds, k, n);
        }
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (uint64_t k = w; k < shards; k += workers) {
                detail::fill_shard(out, sampler, seeds, k, n);
            }
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

} // namespace bellgen
