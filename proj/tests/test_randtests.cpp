#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "bellgen/randtests.hpp"

using namespace bellgen;

namespace {

std::vector<uint8_t> alternating(size_t n) {
    std::vector<uint8_t> bits(n);
    for (size_t k = 0; k < n; ++k) bits[k] = k % 2;
    return bits;
}

std::vector<uint8_t> constant(size_t n, uint8_t value) {
    return std::vector<uint8_t>(n, value);
}

std::vector<uint8_t> default_stream_bits(uint64_t n_records, BitPolicy policy) {
    const auto records = generate_stream(SeedSpec{42, 65536}, n_records, AngleConfig{});
    return extract_bits(records, policy);
}

} // namespace

TEST_CASE("extract_bits policies") {
    const std::vector<Record> one{{Sign::plus, Sign::minus, Setting::one, Setting::one}};
    CHECK(extract_bits(one, BitPolicy::left) == std::vector<uint8_t>{1});
    CHECK(extract_bits(one, BitPolicy::right) == std::vector<uint8_t>{0});
    CHECK(extract_bits(one, BitPolicy::interleaved) == std::vector<uint8_t>{1, 0});
    CHECK(extract_bits(one, BitPolicy::xor_product) == std::vector<uint8_t>{1});

    const std::vector<Record> agree{{Sign::minus, Sign::minus, Setting::two, Setting::one}};
    CHECK(extract_bits(agree, BitPolicy::xor_product) == std::vector<uint8_t>{0});

    CHECK_THROWS_AS(parse_policy("bogus"), error);
}

TEST_CASE("flipping every record sign flips outcome bits but not xor bits") {
    Xoshiro256ss rng(321);
    std::vector<Record> records, flipped;
    for (int k = 0; k < 500; ++k) {
        const uint64_t w = rng.next_u64();
        const Record r{w & 1 ? Sign::plus : Sign::minus, w & 2 ? Sign::plus : Sign::minus,
                       w & 4 ? Setting::one : Setting::two, w & 8 ? Setting::one : Setting::two};
        records.push_back(r);
        flipped.push_back(Record{r.a == Sign::plus ? Sign::minus : Sign::plus,
                                 r.b == Sign::plus ? Sign::minus : Sign::plus, r.i, r.j});
    }
    for (BitPolicy policy : {BitPolicy::left, BitPolicy::right, BitPolicy::interleaved}) {
        const auto original = extract_bits(records, policy);
        const auto mirrored = extract_bits(flipped, policy);
        REQUIRE(original.size() == mirrored.size());
        for (size_t k = 0; k < original.size(); ++k) CHECK(original[k] == (1 - mirrored[k]));
    }
    CHECK(extract_bits(records, BitPolicy::xor_product) ==
          extract_bits(flipped, BitPolicy::xor_product));
}

TEST_CASE("monobit") {
    const auto balanced = monobit(alternating(1000));
    CHECK(balanced.statistic == 0.0);
    CHECK(balanced.p_value == 1.0);
    CHECK(balanced.status == TestStatus::pass);

    const auto ones = monobit(constant(100, 1));
    CHECK(ones.statistic == doctest::Approx(10.0).epsilon(1e-15));
    // erfc(10/sqrt(2)), frozen from a 40-digit evaluation
    CHECK(std::fabs(ones.p_value - 1.5239706048321052e-23) < 1e-10 * 1.5239706048321052e-23);
    CHECK(ones.status == TestStatus::fail);

    CHECK_THROWS_AS(monobit(alternating(99)), insufficient_bits_error);

    CHECK(monobit(default_stream_bits(500000, BitPolicy::left)).p_value > 0.01);
}

TEST_CASE("block_frequency") {
    // Every block exactly half ones -> chi2 = 0, p = 1.
    const auto half = block_frequency(alternating(2000), 20);
    CHECK(half.statistic == 0.0);
    CHECK(half.p_value == 1.0);
    CHECK(half.status == TestStatus::pass);

    const auto zeros = block_frequency(constant(200, 0), 20);
    CHECK(zeros.statistic == doctest::Approx(200.0).epsilon(1e-15));
    // igamc(5, 100), frozen from a 40-digit evaluation
    CHECK(std::fabs(zeros.p_value - 1.6139305336977305e-37) < 1e-10 * 1.6139305336977305e-37);
    CHECK(zeros.status == TestStatus::fail);

    CHECK_THROWS_AS(block_frequency(alternating(99), 20), insufficient_bits_error);
    CHECK_THROWS_AS(block_frequency(alternating(1000), 19), insufficient_bits_error);
    CHECK_THROWS_AS(block_frequency(alternating(100), 128), insufficient_bits_error);

    CHECK(block_frequency(default_stream_bits(500000, BitPolicy::left), 128).p_value > 0.01);
}

TEST_CASE("runs test") {
    // Alternating bits: the maximum possible number of runs, decisive fail.
    const auto alt = runs_test(alternating(1000));
    CHECK(alt.statistic == 1000.0);
    CHECK(alt.p_value < 1e-100);
    CHECK(alt.status == TestStatus::fail);

    // Worked 10-bit example, gate lowered to exercise the arithmetic:
    // pi = 0.6, V = 7, p = erfc(2.2 / (2*sqrt(20)*0.24)).
    const std::vector<uint8_t> sample{1, 0, 0, 1, 1, 0, 1, 0, 1, 1};
    const auto small = runs_test(sample, 0.01, 1);
    CHECK(small.statistic == 7.0);
    CHECK(std::fabs(small.p_value - 0.14723225536366556) < 1e-10 * 0.14723225536366556);
    CHECK(small.status == TestStatus::pass);

    // Prerequisite failure is a distinct status, not a crash.
    const auto zeros = runs_test(constant(200, 0));
    CHECK(zeros.status == TestStatus::not_applicable);
    CHECK(!zeros.note.empty());

    CHECK_THROWS_AS(runs_test(alternating(50)), insufficient_bits_error);

    CHECK(runs_test(default_stream_bits(500000, BitPolicy::left)).p_value > 0.01);
}

TEST_CASE("battery statuses for the fixture inputs") {
    const auto good = run_battery(default_stream_bits(500000, BitPolicy::left), 0.01);
    CHECK(good.pass);
    for (const auto& r : good.reports) CHECK(r.status == TestStatus::pass);

    const auto zeros = run_battery(constant(100000, 0), 0.01);
    CHECK(!zeros.pass);
    REQUIRE(zeros.reports.size() == 3);
    CHECK(zeros.reports[0].status == TestStatus::fail);            // monobit
    CHECK(zeros.reports[1].status == TestStatus::fail);            // block_frequency
    CHECK(zeros.reports[2].status == TestStatus::not_applicable);  // runs prerequisite

    const auto alt = run_battery(alternating(100000), 0.01);
    CHECK(!alt.pass);
    CHECK(alt.reports[0].status == TestStatus::pass);
    CHECK(alt.reports[1].status == TestStatus::pass);
    CHECK(alt.reports[2].status == TestStatus::fail);

    const auto tiny = run_battery(alternating(50), 0.01);
    CHECK(!tiny.pass);
    for (const auto& r : tiny.reports) CHECK(r.status == TestStatus::error);

    CHECK_THROWS_AS(run_battery(alternating(1000), 0.6), error);
    CHECK_THROWS_AS(run_battery(alternating(1000), 0.0), error);
}

TEST_CASE("both marginal streams are fair; the xor stream is biased") {
    const auto right = run_battery(default_stream_bits(500000, BitPolicy::right), 0.01);
    CHECK(right.pass);

    // At the default angles the outcome product agrees with probability
    // (1 + avg E)/2, so xor bits carry mean 1/2 - sqrt(2)/8.
    const auto xor_bits = default_stream_bits(500000, BitPolicy::xor_product);
    uint64_t ones = 0;
    for (uint8_t b : xor_bits) ones += b;
    const double p = 0.5 - std::sqrt(2.0) / 8.0;
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(xor_bits.size()));
    CHECK(std::fabs(static_cast<double>(ones) / static_cast<double>(xor_bits.size()) - p) <
          4.0 * se);
    CHECK(monobit(xor_bits).status == TestStatus::fail);
}

TEST_CASE("all reported p-values lie in [0,1]") {
    Xoshiro256ss rng(555);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<uint8_t> bits(256);
        for (auto& b : bits) b = rng.next_u64() & 1;
        for (const auto& r : run_battery(bits, 0.01).reports) {
            CHECK(r.p_value >= 0.0);
            CHECK(r.p_value <= 1.0);
        }
    }
}

TEST_CASE("bitfile layout and round trip") {
    // 8 bits packed MSB first: 1000'0001 -> 0x81, preceded by the LE count.
    std::ostringstream out(std::ios::binary);
    write_bitfile(out, std::vector<uint8_t>{1, 0, 0, 0, 0, 0, 0, 1, 1, 1});
    const std::string blob = out.str();
    REQUIRE(blob.size() == 8 + 2);
    CHECK(static_cast<uint8_t>(blob[0]) == 10); // little-endian count
    for (int k = 1; k < 8; ++k) CHECK(blob[static_cast<size_t>(k)] == 0);
    CHECK(static_cast<uint8_t>(blob[8]) == 0x81);
    CHECK(static_cast<uint8_t>(blob[9]) == 0xC0); // trailing pad zeros

    Xoshiro256ss rng(888);
    for (size_t n : {0UL, 1UL, 7UL, 8UL, 9UL, 63UL, 64UL, 65UL, 1000UL}) {
        std::vector<uint8_t> bits(n);
        for (auto& b : bits) b = rng.next_u64() & 1;
        std::ostringstream sink(std::ios::binary);
        write_bitfile(sink, bits);
        std::istringstream source(sink.str(), std::ios::binary);
        CHECK(read_bitfile(source) == bits);
    }

    std::istringstream truncated(std::string("\xFF\x00", 2), std::ios::binary);
    CHECK_THROWS_AS(read_bitfile(truncated), format_error);

    std::string short_body(8, '\0');
    short_body[0] = 32; // promises 32 bits, provides none
    std::istringstream hollow(short_body, std::ios::binary);
    CHECK_THROWS_AS(read_bitfile(hollow), format_error);
}
