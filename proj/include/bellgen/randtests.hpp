#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bellgen/sampler.hpp"
#include "bellgen/special.hpp"

namespace bellgen {

/// How to turn a record stream into bits. Outcomes map +1 -> 1, -1 -> 0;
/// the xor policy emits the outcome product mapped +1 -> 0, -1 -> 1.
enum class BitPolicy { left, right, interleaved, xor_product };

inline BitPolicy parse_policy(const std::string& name) {
    if (name == "left") return BitPolicy::left;
    if (name == "right") return BitPolicy::right;
    if (name == "interleaved") return BitPolicy::interleaved;
    if (name == "xor") return BitPolicy::xor_product;
    throw error("unknown bit policy: " + name);
}

inline const char* policy_name(BitPolicy p) {
    switch (p) {
        case BitPolicy::left: return "left";
        case BitPolicy::right: return "right";
        case BitPolicy::interleaved: return "interleaved";
        default: return "xor";
    }
}

inline std::vector<uint8_t> extract_bits(std::span<const Record> records, BitPolicy policy) {
    std::vector<uint8_t> bits;
    bits.reserve(policy == BitPolicy::interleaved ? records.size() * 2 : records.size());
    for (const Record& r : records) {
        const uint8_t a = r.a == Sign::plus ? 1 : 0;
        const uint8_t b = r.b == Sign::plus ? 1 : 0;
        switch (policy) {
            case BitPolicy::left: bits.push_back(a); break;
            case BitPolicy::right: bits.push_back(b); break;
            case BitPolicy::interleaved:
                bits.push_back(a);
                bits.push_back(b);
                break;
            case BitPolicy::xor_product: bits.push_back(a == b ? 0 : 1); break;
        }
    }
    return bits;
}

enum class TestStatus { pass, fail, not_applicable, error };

inline const char* status_name(TestStatus s) {
    switch (s) {
        case TestStatus::pass: return "PASS";
        case TestStatus::fail: return "FAIL";
        case TestStatus::not_applicable: return "NOT_APPLICABLE";
        default: return "ERROR";
    }
}

struct TestReport {
    std::string name;
    uint64_t n_bits = 0;
    double statistic = 0.0;
    double p_value = 0.0;
    TestStatus status = TestStatus::error;
    std::string note;
};

inline constexpr uint64_t kMinTestBits = 100;
inline constexpr double kDefaultAlpha = 0.01;
inline constexpr int kDefaultBlockLength = 128;

/// Frequency test: s_obs = |sum(2b - 1)| / sqrt(n), p = erfc(s_obs/sqrt(2)).
inline TestReport monobit(std::span<const uint8_t> bits, double alpha = kDefaultAlpha) {
    const uint64_t n = bits.size();
    if (n < kMinTestBits) {
        throw insufficient_bits_error("monobit requires at least " +
                                      std::to_string(kMinTestBits) + " bits, got " +
                                      std::to_string(n));
    }
    int64_t sum = 0;
    for (uint8_t b : bits) sum += 2 * static_cast<int64_t>(b) - 1;
    const double s_obs = std::fabs(static_cast<double>(sum)) / std::sqrt(static_cast<double>(n));
    const double p = special::erfc(s_obs / std::sqrt(2.0));
    return TestReport{"monobit", n, s_obs, p, p >= alpha ? TestStatus::pass : TestStatus::fail, ""};
}

/// Block frequency test over blocks of length M (trailing bits discarded):
/// chi2 = 4M sum (pi_i - 1/2)^2, p = igamc(N/2, chi2/2).
inline TestReport block_frequency(std::span<const uint8_t> bits, int block_length = kDefaultBlockLength,
                                  double alpha = kDefaultAlpha) {
    const uint64_t n = bits.size();
    if (n < kMinTestBits) {
        throw insufficient_bits_error("block_frequency requires at least " +
                                      std::to_string(kMinTestBits) + " bits, got " +
                                      std::to_string(n));
    }
    if (block_length < 20) {
        throw insufficient_bits_error("block_frequency requires block length >= 20");
    }
    const uint64_t n_blocks = n / static_cast<uint64_t>(block_length);
    if (n_blocks == 0) {
        throw insufficient_bits_error("block_frequency requires at least one full block");
    }
    double chi2 = 0.0;
    for (uint64_t blk = 0; blk < n_blocks; ++blk) {
        uint64_t ones = 0;
        const uint64_t base = blk * static_cast<uint64_t>(block_length);
        for (int k = 0; k < block_length; ++k) ones += bits[base + static_cast<uint64_t>(k)];
        const double pi = static_cast<double>(ones) / block_length;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * block_length;
    const double p = special::igamc(static_cast<double>(n_blocks) / 2.0, chi2 / 2.0);
    return TestReport{"block_frequency", n, chi2, p,
                      p >= alpha ? TestStatus::pass : TestStatus::fail, ""};
}

/// Runs test: V = 1 + number of adjacent unequal pairs,
/// p = erfc(|V - 2n pi(1-pi)| / (2 sqrt(2n) pi(1-pi))). Applies only when
/// the ones fraction pi satisfies |pi - 1/2| < 2/sqrt(n); otherwise reports
/// NOT_APPLICABLE. min_bits exists so the arithmetic can be exercised on
/// short fixture strings.
inline TestReport runs_test(std::span<const uint8_t> bits, double alpha = kDefaultAlpha,
                            uint64_t min_bits = kMinTestBits) {
    const uint64_t n = bits.size();
    if (n < min_bits || n < 2) {
        throw insufficient_bits_error("runs test requires at least " + std::to_string(min_bits) +
                                      " bits, got " + std::to_string(n));
    }
    uint64_t ones = 0;
    for (uint8_t b : bits) ones += b;
    const double pi = static_cast<double>(ones) / static_cast<double>(n);
    const double tau = 2.0 / std::sqrt(static_cast<double>(n));
    if (std::fabs(pi - 0.5) >= tau) {
        return TestReport{"runs", n, 0.0, 0.0, TestStatus::not_applicable,
                          "ones fraction " + std::to_string(pi) +
                              " fails the frequency prerequisite"};
    }
    uint64_t v = 1;
    for (uint64_t k = 0; k + 1 < n; ++k) {
        if (bits[k] != bits[k + 1]) ++v;
    }
    const double nd = static_cast<double>(n);
    const double p = special::erfc(std::fabs(static_cast<double>(v) - 2.0 * nd * pi * (1.0 - pi)) /
                                   (2.0 * std::sqrt(2.0 * nd) * pi * (1.0 - pi)));
    return TestReport{"runs", n, static_cast<double>(v), p,
                      p >= alpha ? TestStatus::pass : TestStatus::fail, ""};
}

struct BatteryResult {
    std::vector<TestReport> reports;
    bool pass = false; // no test failed or errored, and at least one passed
};

/// Runs the full battery with default parameters. Per-test parameter
/// problems become ERROR entries instead of aborting the battery.
inline BatteryResult run_battery(std::span<const uint8_t> bits, double alpha = kDefaultAlpha,
                                 int block_length = kDefaultBlockLength) {
    if (!(alpha > 0.0) || !(alpha < 0.5)) {
        throw error("significance level must lie in (0, 0.5)");
    }
    BatteryResult result;
    const auto guard = [&](const char* name, auto&& test) {
        try {
            result.reports.push_back(test());
        } catch (const error& e) {
            result.reports.push_back(
                TestReport{name, bits.size(), 0.0, 0.0, TestStatus::error, e.what()});
        }
    };
    guard("monobit", [&] { return monobit(bits, alpha); });
    guard("block_frequency", [&] { return block_frequency(bits, block_length, alpha); });
    guard("runs", [&] { return runs_test(bits, alpha); });
    bool any_pass = false;
    bool any_bad = false;
    for (const TestReport& r : result.reports) {
        if (r.status == TestStatus::pass) any_pass = true;
        if (r.status == TestStatus::fail || r.status == TestStatus::error) any_bad = true;
    }
    result.pass = any_pass && !any_bad;
    return result;
}

// Bitfile format: an 8-byte little-endian bit count, then the bits packed
// most significant bit first, final partial byte zero-padded.

inline void write_bitfile(std::ostream& out, std::span<const uint8_t> bits) {
    const uint64_t n = bits.size();
    char header[8];
    for (int k = 0; k < 8; ++k) header[k] = static_cast<char>((n >> (8 * k)) & 0xFF);
    out.write(header, 8);
    uint8_t acc = 0;
    int filled = 0;
    for (uint8_t b : bits) {
        acc = static_cast<uint8_t>((acc << 1) | (b & 1));
        if (++filled == 8) {
            out.put(static_cast<char>(acc));
            acc = 0;
            filled = 0;
        }
    }
    if (filled > 0) {
        acc = static_cast<uint8_t>(acc << (8 - filled));
        out.put(static_cast<char>(acc));
    }
    if (!out) throw error("bitfile write failed");
}

inline std::vector<uint8_t> read_bitfile(std::istream& in) {
    char header[8];
    in.read(header, 8);
    if (in.gcount() != 8) throw format_error("bitfile: truncated header");
    uint64_t n = 0;
    for (int k = 0; k < 8; ++k)
        n |= static_cast<uint64_t>(static_cast<uint8_t>(header[k])) << (8 * k);
    const uint64_t n_bytes = (n + 7) / 8;
    std::vector<char> packed(n_bytes);
    in.read(packed.data(), static_cast<std::streamsize>(n_bytes));
    if (static_cast<uint64_t>(in.gcount()) != n_bytes) {
        throw format_error("bitfile: body shorter than header bit count");
    }
    std::vector<uint8_t> bits(n);
    for (uint64_t k = 0; k < n; ++k) {
        const auto byte = static_cast<uint8_t>(packed[k / 8]);
        bits[k] = (byte >> (7 - (k % 8))) & 1;
    }
    return bits;
}

inline void write_bitfile(const std::filesystem::path& path, std::span<const uint8_t> bits) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open bitfile for writing: " + path.string());
    write_bitfile(out, bits);
}

inline std::vector<uint8_t> read_bitfile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open bitfile: " + path.string());
    return read_bitfile(in);
}

} // namespace bellgen
