#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "bellgen/sampler.hpp"
#include "bellgen/special.hpp"

using namespace bellgen;

TEST_CASE("splitmix64 and xoshiro256** produce their reference sequences") {
    // splitmix64 from state 0 (published test vector).
    CHECK(shard_seed(0, 0) == 0xe220a8397b1dcdafULL);
    CHECK(shard_seed(42, 0) == 0xbdd732262feb6e95ULL);
    CHECK(shard_seed(42, 1) == 0x28efe333b266f103ULL);

    Xoshiro256ss rng(12345);
    CHECK(rng.next_u64() == 0xbe6a36374160d49bULL);
    CHECK(rng.next_u64() == 0x214aaa0637a688c6ULL);
    CHECK(rng.next_u64() == 0xf69d16de9954d388ULL);

    Xoshiro256ss units(12345);
    CHECK(units.next_unit() == doctest::Approx(0.74380816315658937).epsilon(1e-16));
    for (int k = 0; k < 1000; ++k) {
        const double u = units.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("to_six_vector copies coordinates and derives selectors") {
    const SixVector v1 = to_six_vector(OmegaPoint(1, 0, -1, 0));
    CHECK(v1 == SixVector{1, 0, -1, 0, Setting::one, Setting::one});

    const SixVector v2 = to_six_vector(OmegaPoint(0, 1, 0, 1));
    CHECK(v2 == SixVector{0, 1, 0, 1, Setting::two, Setting::two});

    const SixVector v3 = to_six_vector(OmegaPoint(-1, 0, 0, 1));
    CHECK(v3 == SixVector{-1, 0, 0, 1, Setting::one, Setting::two});
}

TEST_CASE("filter_record drops zeros and keeps the selectors") {
    const Record r1 = filter_record(SixVector{1, 0, -1, 0, Setting::one, Setting::one});
    CHECK(r1 == Record{Sign::plus, Sign::minus, Setting::one, Setting::one});

    const Record r2 = filter_record(SixVector{0, -1, 1, 0, Setting::two, Setting::one});
    CHECK(r2 == Record{Sign::minus, Sign::plus, Setting::two, Setting::one});

    CHECK_THROWS_AS(filter_record(SixVector{0, -1, 1, 0, Setting::one, Setting::one}),
                    malformed_vector_error);
    CHECK_THROWS_AS(filter_record(SixVector{1, 0, 0, 0, Setting::one, Setting::one}),
                    malformed_vector_error);
    CHECK_THROWS_AS(filter_record(SixVector{1, 1, 0, 1, Setting::one, Setting::two}),
                    malformed_vector_error);
}

TEST_CASE("filtering is a bijection between omega points and records") {
    std::set<std::tuple<int, int, int, int>> seen;
    for (int k = 0; k < kAtomCount; ++k) {
        const OmegaPoint omega = OmegaPoint::from_atom(k);
        const SixVector six = to_six_vector(omega);
        const Record rec = filter_record(six);
        CHECK(reconstruct_six_vector(rec) == six);
        seen.insert({as_int(rec.a), as_int(rec.b), as_int(rec.i), as_int(rec.j)});
    }
    CHECK(seen.size() == 16);
}

TEST_CASE("sample_omega: degenerate measure always yields its atom") {
    std::array<double, kAtomCount> weights{};
    weights[9] = 1.0;
    const Measure m(weights);
    Xoshiro256ss rng(5);
    for (int k = 0; k < 1000; ++k) {
        CHECK(sample_omega(rng, m).atom() == 9);
    }
}

TEST_CASE("each draw consumes exactly one uniform deviate") {
    const Measure measure = build_measure(AngleConfig{});
    const OmegaSampler sampler(measure);
    Xoshiro256ss used(31415), advanced(31415);
    for (int k = 0; k < 257; ++k) {
        sampler.sample(used);
        advanced.next_unit();
    }
    CHECK(used.next_u64() == advanced.next_u64());
    Xoshiro256ss via_free(31415), again(31415);
    sample_omega(via_free, measure);
    again.next_unit();
    CHECK(via_free.next_u64() == again.next_u64());
}

TEST_CASE("sampling is deterministic in the seed with a frozen prefix") {
    const OmegaSampler sampler(build_measure(AngleConfig{}));
    Xoshiro256ss rng(shard_seed(42, 0));
    const std::vector<int> expected{0, 5, 12, 8, 9, 14, 7, 2, 14, 13, 14, 4};
    for (int atom : expected) {
        CHECK(sampler.sample(rng).atom() == atom);
    }

    Xoshiro256ss r1(shard_seed(123, 0)), r2(shard_seed(123, 0));
    for (int k = 0; k < 4096; ++k) {
        CHECK(sampler.sample(r1) == sampler.sample(r2));
    }
}

TEST_CASE("empirical atom frequencies track the exact weights") {
    const AngleConfig angles{};
    const Measure measure = build_measure(angles);
    const OmegaSampler sampler(measure);
    constexpr uint64_t n = 1000000;

    std::array<uint64_t, kAtomCount> freq{};
    Xoshiro256ss rng(shard_seed(42, 0));
    for (uint64_t k = 0; k < n; ++k) ++freq[static_cast<size_t>(sampler.sample(rng).atom())];

    double chi2 = 0.0;
    for (int k = 0; k < kAtomCount; ++k) {
        const double w = measure.weight_at(k);
        const double se = std::sqrt(w * (1.0 - w) / static_cast<double>(n));
        const double observed = static_cast<double>(freq[static_cast<size_t>(k)]) / n;
        CHECK(std::fabs(observed - w) < 4.0 * se);
        const double expected = w * static_cast<double>(n);
        chi2 += (static_cast<double>(freq[static_cast<size_t>(k)]) - expected) *
                (static_cast<double>(freq[static_cast<size_t>(k)]) - expected) / expected;
    }
    // Goodness of fit over the 16 cells, df = 15; golden seed stays comfortably
    // above the 0.001 cut.
    CHECK(special::chisq_pvalue(chi2, 15.0) > 0.001);

    // Each setting pair appears with frequency 1/4.
    for (Setting i : kSettings) {
        for (Setting j : kSettings) {
            uint64_t block = 0;
            for (Sign e : kSigns)
                for (Sign ep : kSigns)
                    block += freq[static_cast<size_t>(atom_index(i, j, e, ep))];
            const double se = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
            CHECK(std::fabs(static_cast<double>(block) / n - 0.25) < 4.0 * se);
        }
    }
}

TEST_CASE("generate_stream basics") {
    CHECK(generate_stream(SeedSpec{42, 65536}, 0, AngleConfig{}).empty());

    const auto frozen = generate_stream(SeedSpec{42, 65536}, 5, AngleConfig{});
    CHECK(frozen[0] == Record{Sign::plus, Sign::plus, Setting::one, Setting::one});
    CHECK(frozen[1] == Record{Sign::plus, Sign::minus, Setting::one, Setting::two});
    CHECK(frozen[2] == Record{Sign::plus, Sign::plus, Setting::two, Setting::two});

    CHECK_THROWS_AS(generate_stream(SeedSpec{1, 0}, 10, AngleConfig{}), error);
}

TEST_CASE("streams are identical for any worker count") {
    const SeedSpec seeds{977, 1000};
    const auto serial = generate_stream(seeds, 25000, AngleConfig{}, 1);
    for (unsigned workers : {2u, 3u, 8u}) {
        CHECK(generate_stream(seeds, 25000, AngleConfig{}, workers) == serial);
    }
}

TEST_CASE("shards are independent streams concatenated in order") {
    const SeedSpec seeds{31337, 500};
    const auto stream = generate_stream(seeds, 1250, AngleConfig{});
    const OmegaSampler sampler(build_measure(AngleConfig{}));
    size_t pos = 0;
    for (uint64_t shard = 0; shard < 3; ++shard) {
        Xoshiro256ss rng(shard_seed(seeds.seed, shard));
        const uint64_t len = shard == 2 ? 250 : 500;
        for (uint64_t k = 0; k < len; ++k) {
            CHECK(stream[pos++] == filter_record(to_six_vector(sampler.sample(rng))));
        }
    }
}

TEST_CASE("a million-record stream reproduces the CHSH value") {
    const auto records = generate_stream(SeedSpec{42, 65536}, 1000000, AngleConfig{});
    double sums[2][2] = {};
    uint64_t ns[2][2] = {};
    for (const Record& r : records) {
        sums[as_int(r.i) - 1][as_int(r.j) - 1] += as_int(r.a) * as_int(r.b);
        ++ns[as_int(r.i) - 1][as_int(r.j) - 1];
    }
    double s_hat = 0.0, var = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double e = sums[i][j] / static_cast<double>(ns[i][j]);
            s_hat += (i == 1 && j == 1) ? -e : e;
            var += (1.0 - e * e) / static_cast<double>(ns[i][j]);
        }
    }
    CHECK(std::fabs(s_hat - 2.8284271247461903) <= 5.0 * std::sqrt(var));
    CHECK(s_hat > 2.0);
}
