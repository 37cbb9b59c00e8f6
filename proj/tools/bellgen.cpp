// bellgen: classical generation and analysis of CHSH-violating record streams.
//
// Subcommands:
//   exact     closed-form pair probabilities, measure, correlations, CHSH
//   sample    seeded record stream generation (csv/jsonl/bin)
//   estimate  empirical conditionals, correlations, CHSH with standard errors
//   bits      bitstream extraction from a record stream
//   test      randomness battery over a bitfile
//   pair-run  distributed source/wing/merge session over TCP

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellgen/bellgen.hpp"

namespace {

using nlohmann::json;

struct AngleFlags {
    std::string file;
    std::vector<double> values; // theta1 theta2 theta1p theta2p when set
    bool degrees = false;
    bool any_flag = false;
};

void add_angle_options(CLI::App* cmd, AngleFlags& flags) {
    flags.values.assign(4, 0.0);
    cmd->add_option("--angles", flags.file, "angle config file (key=value lines, radians)");
    auto* t1 = cmd->add_option("--theta1", flags.values[0], "left orientation 1 (default 0)");
    auto* t2 = cmd->add_option("--theta2", flags.values[1], "left orientation 2 (default pi/2)");
    auto* t1p = cmd->add_option("--theta1p", flags.values[2], "right orientation 1 (default pi/4)");
    auto* t2p = cmd->add_option("--theta2p", flags.values[3], "right orientation 2 (default -pi/4)");
    cmd->add_flag("--degrees", flags.degrees, "interpret --theta* flags as degrees");
    cmd->callback([&flags, t1, t2, t1p, t2p] {
        flags.any_flag = t1->count() || t2->count() || t1p->count() || t2p->count();
    });
}

bellgen::AngleConfig resolve_angles(const AngleFlags& flags) {
    if (!flags.file.empty() && flags.any_flag) {
        throw CLI::ValidationError("--angles", "give either an angle file or --theta* flags");
    }
    if (!flags.file.empty()) {
        if (flags.degrees) {
            throw CLI::ValidationError("--degrees", "angle files are always in radians");
        }
        return bellgen::load_angle_file(flags.file);
    }
    if (flags.any_flag) {
        bellgen::AngleConfig a{flags.values[0], flags.values[1], flags.values[2],
                               flags.values[3]};
        if (flags.degrees) {
            a = bellgen::AngleConfig{
                bellgen::degrees_to_radians(a.theta1), bellgen::degrees_to_radians(a.theta2),
                bellgen::degrees_to_radians(a.theta1p), bellgen::degrees_to_radians(a.theta2p)};
        }
        a.validate();
        return a;
    }
    return bellgen::AngleConfig{};
}

bellgen::SignPattern parse_pattern(const std::string& text) {
    return bellgen::SignPattern{bellgen::setting_from_int(text[0] - '0'),
                                bellgen::setting_from_int(text[1] - '0')};
}

std::string pattern_text(bellgen::SignPattern p) {
    return std::to_string(bellgen::as_int(p.i)) + std::to_string(bellgen::as_int(p.j));
}

json angles_json(const bellgen::AngleConfig& a) {
    return json{{"theta1", a.theta1},
                {"theta2", a.theta2},
                {"theta1p", a.theta1p},
                {"theta2p", a.theta2p}};
}

std::string pair_key(bellgen::Setting i, bellgen::Setting j) {
    return std::to_string(bellgen::as_int(i)) + std::to_string(bellgen::as_int(j));
}

const char* outcome_key(bellgen::Sign e, bellgen::Sign ep) {
    const bool pe = e == bellgen::Sign::plus;
    const bool pp = ep == bellgen::Sign::plus;
    return pe ? (pp ? "pp" : "pm") : (pp ? "mp" : "mm");
}

// ---- exact ---------------------------------------------------------------

struct ExactOpts {
    AngleFlags angles;
    std::string pattern = "22";
    bool as_json = false;
};

int run_exact(const ExactOpts& opts) {
    const bellgen::AngleConfig angles = resolve_angles(opts.angles);
    const bellgen::SignPattern pattern = parse_pattern(opts.pattern);
    const auto table = bellgen::build_pair_table(angles);
    const auto measure = bellgen::build_measure(angles);
    const auto chsh = bellgen::chsh_value(angles, pattern);

    if (opts.as_json) {
        json doc;
        doc["meta"] = {{"version", bellgen::kVersion},
                       {"angles", angles_json(angles)},
                       {"pattern", pattern_text(pattern)}};
        json pt = json::object();
        json corr = json::object();
        for (bellgen::Setting i : bellgen::kSettings) {
            for (bellgen::Setting j : bellgen::kSettings) {
                json block = json::object();
                for (bellgen::Sign e : bellgen::kSigns)
                    for (bellgen::Sign ep : bellgen::kSigns)
                        block[outcome_key(e, ep)] = table(i, j, e, ep);
                pt[pair_key(i, j)] = block;
                corr[pair_key(i, j)] =
                    chsh.correlation[bellgen::as_int(i) - 1][bellgen::as_int(j) - 1];
            }
        }
        doc["pair_table"] = pt;
        json meas = json::array();
        for (const auto& omega : bellgen::all_omega_points()) {
            meas.push_back(json{{"omega", {omega.x1(), omega.x2(), omega.x3(), omega.x4()}},
                                {"weight", measure.weight(omega)}});
        }
        doc["measure"] = meas;
        doc["correlations"] = corr;
        doc["chsh"] = {{"s", chsh.s}, {"pattern", pattern_text(pattern)}};
        doc["chsh_max"] = chsh.s_max;
        std::cout << doc.dump(2) << '\n';
        return 0;
    }

    std::printf("bellgen exact v%s | theta1=%g theta2=%g theta1p=%g theta2p=%g rad | minus on (%c,%c)\n\n",
                bellgen::kVersion, angles.theta1, angles.theta2, angles.theta1p, angles.theta2p,
                opts.pattern[0], opts.pattern[1]);
    std::printf("pair probabilities p_ij(eps,eps'):\n");
    std::printf("  (i,j)        ++          +-          -+          --       sum\n");
    for (bellgen::Setting i : bellgen::kSettings) {
        for (bellgen::Setting j : bellgen::kSettings) {
            std::printf("  (%d,%d)  %10.7f  %10.7f  %10.7f  %10.7f  %8.6f\n", bellgen::as_int(i),
                        bellgen::as_int(j), table(i, j, bellgen::Sign::plus, bellgen::Sign::plus),
                        table(i, j, bellgen::Sign::plus, bellgen::Sign::minus),
                        table(i, j, bellgen::Sign::minus, bellgen::Sign::plus),
                        table(i, j, bellgen::Sign::minus, bellgen::Sign::minus),
                        table.block_sum(i, j));
        }
    }
    std::printf("\nmeasure weights (x1,x2,x3,x4) -> P, total mass %.12f:\n", measure.total_mass());
    const auto coord = [](int x) { return x == 0 ? " 0" : (x > 0 ? "+1" : "-1"); };
    for (const auto& omega : bellgen::all_omega_points()) {
        std::printf("  (%s,%s,%s,%s)  %.9f\n", coord(omega.x1()), coord(omega.x2()),
                    coord(omega.x3()), coord(omega.x4()), measure.weight(omega));
    }
    std::printf("\ncorrelations E_ij:\n");
    for (bellgen::Setting i : bellgen::kSettings) {
        std::printf(" ");
        for (bellgen::Setting j : bellgen::kSettings) {
            std::printf("  E_%d%d = %+.12f", bellgen::as_int(i), bellgen::as_int(j),
                        chsh.correlation[bellgen::as_int(i) - 1][bellgen::as_int(j) - 1]);
        }
        std::printf("\n");
    }
    std::printf("\nCHSH S (minus on (%c,%c)) = %.15f\n", opts.pattern[0], opts.pattern[1], chsh.s);
    std::printf("CHSH S_max over single-minus patterns = %.15f\n", chsh.s_max);
    return 0;
}

// ---- sample ---------------------------------------------------------------

struct SampleOpts {
    AngleFlags angles;
    uint64_t n = 0;
    uint64_t seed = 42;
    uint64_t shard_size = 65536;
    unsigned workers = 1;
    std::string format = "csv";
    std::string out;
};

int run_sample(const SampleOpts& opts) {
    const bellgen::AngleConfig angles = resolve_angles(opts.angles);
    const bellgen::Format format = bellgen::parse_format(opts.format);
    const bellgen::SeedSpec seeds{opts.seed, opts.shard_size};
    const auto records = bellgen::generate_stream(seeds, opts.n, angles, opts.workers);
    if (opts.out.empty() || opts.out == "-") {
        bellgen::write_records(std::cout, records, format);
    } else {
        bellgen::write_record_file(opts.out, records, format);
    }
    std::fprintf(stderr, "bellgen sample v%s | seed=%" PRIu64 " shard_size=%" PRIu64
                         " n=%" PRIu64 " format=%s workers=%u\n",
                 bellgen::kVersion, opts.seed, opts.shard_size, opts.n, opts.format.c_str(),
                 opts.workers);
    return 0;
}

// ---- estimate ---------------------------------------------------------------

struct EstimateOpts {
    std::string in;
    std::string format = "csv";
    std::string pattern = "22";
    double threshold = bellgen::kDefaultViolationThreshold;
    bool as_json = false;
};

int run_estimate(const EstimateOpts& opts) {
    const bellgen::Format format = bellgen::parse_format(opts.format);
    const bellgen::SignPattern pattern = parse_pattern(opts.pattern);
    const auto records = bellgen::read_record_file(opts.in, format);
    const auto counts = bellgen::count_records(records);
    const auto cond = bellgen::empirical_conditionals(counts);
    const auto chsh = bellgen::empirical_chsh(counts, pattern);
    const auto verdict = bellgen::classify_chsh(chsh, opts.threshold);

    if (opts.as_json) {
        json doc;
        doc["meta"] = {{"version", bellgen::kVersion},
                       {"input", opts.in},
                       {"format", opts.format},
                       {"pattern", pattern_text(pattern)},
                       {"threshold", opts.threshold},
                       {"records", counts.total()}};
        json conditionals = json::object();
        json correlations = json::object();
        for (bellgen::Setting i : bellgen::kSettings) {
            for (bellgen::Setting j : bellgen::kSettings) {
                json block = json::object();
                for (bellgen::Sign e : bellgen::kSigns) {
                    for (bellgen::Sign ep : bellgen::kSigns) {
                        const auto& cell = cond.at(i, j, e, ep);
                        block[outcome_key(e, ep)] = {{"estimate", cell.value}, {"se", cell.se}};
                    }
                }
                block["n"] = cond.block_n(i, j);
                conditionals[pair_key(i, j)] = block;
                correlations[pair_key(i, j)] = {
                    {"estimate", chsh.e_hat[bellgen::as_int(i) - 1][bellgen::as_int(j) - 1]},
                    {"se", chsh.se_e[bellgen::as_int(i) - 1][bellgen::as_int(j) - 1]},
                    {"n", chsh.n_cells[bellgen::as_int(i) - 1][bellgen::as_int(j) - 1]}};
            }
        }
        doc["conditionals"] = conditionals;
        doc["correlations"] = correlations;
        doc["chsh"] = {{"s", chsh.s_hat},
                       {"se", chsh.se_s},
                       {"pattern", pattern_text(pattern)},
                       {"threshold", opts.threshold}};
        doc["verdict"] = bellgen::verdict_name(verdict);
        std::cout << doc.dump(2) << '\n';
        return 0;
    }

    std::printf("bellgen estimate v%s | in=%s (%s) | minus on (%c,%c) | threshold %.1f se | %" PRIu64
                " records\n\n",
                bellgen::kVersion, opts.in.c_str(), opts.format.c_str(), opts.pattern[0],
                opts.pattern[1], opts.threshold, counts.total());
    std::printf("conditional estimates p^_ij(eps,eps') with se:\n");
    std::printf("  (i,j)        ++                +-                -+                --\n");
    for (bellgen::Setting i : bellgen::kSettings) {
        for (bellgen::Setting j : bellgen::kSettings) {
            std::printf("  (%d,%d)", bellgen::as_int(i), bellgen::as_int(j));
            for (bellgen::Sign e : bellgen::kSigns)
                for (bellgen::Sign ep : bellgen::kSigns) {
                    const auto& cell = cond.at(i, j, e, ep);
                    std::printf("  %.5f (%.5f)", cell.value, cell.se);
                }
            std::printf("   n=%" PRIu64 "\n", cond.block_n(i, j));
        }
    }
    std::printf("\ncorrelation estimates:\n");
    for (bellgen::Setting i : bellgen::kSettings)
        for (bellgen::Setting j : bellgen::kSettings)
            std::printf("  E^_%d%d = %+.6f (se %.6f, n=%" PRIu64 ")\n", bellgen::as_int(i),
                        bellgen::as_int(j),
                        chsh.e_hat[bellgen::as_int(i) - 1][bellgen::as_int(j) - 1],
                        chsh.se_e[bellgen::as_int(i) - 1][bellgen::as_int(j) - 1],
                        chsh.n_cells[bellgen::as_int(i) - 1][bellgen::as_int(j) - 1]);
    std::printf("\nS^ = %.6f (se %.6f)\n", chsh.s_hat, chsh.se_s);
    std::printf("verdict: %s\n", bellgen::verdict_name(verdict));
    return 0;
}

// ---- bits ---------------------------------------------------------------

struct BitsOpts {
    std::string in;
    std::string format = "csv";
    std::string policy = "left";
    std::string out;
    bool as_json = false;
};

int run_bits(const BitsOpts& opts) {
    const auto records = bellgen::read_record_file(opts.in, bellgen::parse_format(opts.format));
    const auto bits = bellgen::extract_bits(records, bellgen::parse_policy(opts.policy));
    bellgen::write_bitfile(std::filesystem::path(opts.out), bits);
    if (opts.as_json) {
        std::cout << json{{"records", records.size()},
                          {"bits", bits.size()},
                          {"policy", opts.policy},
                          {"out", opts.out}}
                         .dump(2)
                  << '\n';
    } else {
        std::printf("extracted %zu bits (policy %s) from %zu records -> %s\n", bits.size(),
                    opts.policy.c_str(), records.size(), opts.out.c_str());
    }
    return 0;
}

// ---- test ---------------------------------------------------------------

struct TestOpts {
    std::string in;
    double alpha = bellgen::kDefaultAlpha;
    int block_length = bellgen::kDefaultBlockLength;
    bool as_json = false;
};

int run_test(const TestOpts& opts) {
    const auto bits = bellgen::read_bitfile(std::filesystem::path(opts.in));
    const auto battery = bellgen::run_battery(bits, opts.alpha, opts.block_length);
    if (opts.as_json) {
        json doc;
        doc["meta"] = {{"version", bellgen::kVersion},
                       {"input", opts.in},
                       {"alpha", opts.alpha},
                       {"block_length", opts.block_length},
                       {"n_bits", bits.size()}};
        json tests = json::array();
        for (const auto& r : battery.reports) {
            tests.push_back(json{{"name", r.name},
                                 {"n_bits", r.n_bits},
                                 {"statistic", r.statistic},
                                 {"p_value", r.p_value},
                                 {"status", bellgen::status_name(r.status)},
                                 {"note", r.note}});
        }
        doc["tests"] = tests;
        doc["summary"] = battery.pass ? "PASS" : "FAIL";
        std::cout << doc.dump(2) << '\n';
    } else {
        std::printf("bellgen test v%s | %s | %zu bits | alpha=%g\n\n", bellgen::kVersion,
                    opts.in.c_str(), bits.size(), opts.alpha);
        for (const auto& r : battery.reports) {
            std::printf("  %-16s statistic=%-14.6g p=%-12.6g %s%s%s\n", r.name.c_str(),
                        r.statistic, r.p_value, bellgen::status_name(r.status),
                        r.note.empty() ? "" : "  ", r.note.c_str());
        }
        std::printf("\nsummary: %s\n", battery.pass ? "PASS" : "FAIL");
    }
    return battery.pass ? 0 : 2;
}

// ---- pair-run ---------------------------------------------------------------

struct PairOpts {
    std::string role;
    std::string listen;
    std::vector<std::string> connect;
    AngleFlags angles;
    uint64_t n = 0;
    uint64_t seed = 42;
    uint64_t shard_size = 65536;
    std::string format = "csv";
    std::string out;
    bool as_json = false;
};

int pair_source(const PairOpts& opts) {
    const bellgen::SessionConfig cfg{{opts.seed, opts.shard_size}, opts.n,
                                     resolve_angles(opts.angles)};
    bellgen::TcpListener listener(bellgen::parse_hostport(opts.listen));
    std::unique_ptr<bellgen::Channel> left, right;
    for (int k = 0; k < 2; ++k) {
        auto ch = listener.accept();
        const auto hello = bellgen::read_message(*ch);
        if (!hello) throw bellgen::protocol_error("peer closed before HELLO");
        if (hello->type == bellgen::MsgType::hello_left && !left) {
            left = std::move(ch);
        } else if (hello->type == bellgen::MsgType::hello_right && !right) {
            right = std::move(ch);
        } else {
            throw bellgen::protocol_error("unexpected HELLO role");
        }
    }
    const auto outcome = bellgen::run_source(cfg, *left, *right);
    std::fprintf(stderr, "source: %s, %" PRIu64 " records delivered\n",
                 outcome.completed ? "completed" : "aborted", outcome.delivered);
    return outcome.completed ? 0 : 2;
}

int pair_wing(const PairOpts& opts, bellgen::Side side) {
    if (opts.connect.size() != 1 || opts.listen.empty()) {
        throw CLI::ValidationError("pair-run",
                                   "wing roles need --connect SOURCE and --listen ADDR");
    }
    bellgen::TcpListener listener(bellgen::parse_hostport(opts.listen));
    auto source = bellgen::tcp_connect(bellgen::parse_hostport(opts.connect[0]));
    bellgen::write_message(*source,
                           side == bellgen::Side::left ? bellgen::MsgType::hello_left
                                                       : bellgen::MsgType::hello_right,
                           0);
    auto merger = listener.accept();
    bellgen::run_wing(side, *source, *merger);
    std::fprintf(stderr, "%s wing: done\n", side == bellgen::Side::left ? "left" : "right");
    return 0;
}

int pair_merge(const PairOpts& opts) {
    if (opts.connect.size() != 2) {
        throw CLI::ValidationError("pair-run",
                                   "merge needs --connect LEFT_ADDR --connect RIGHT_ADDR");
    }
    auto left = bellgen::tcp_connect(bellgen::parse_hostport(opts.connect[0]));
    auto right = bellgen::tcp_connect(bellgen::parse_hostport(opts.connect[1]));
    const auto result = bellgen::run_merge(*left, *right);
    if (!opts.out.empty()) {
        bellgen::write_record_file(opts.out, result.records, bellgen::parse_format(opts.format));
    }
    const char* status = result.status == bellgen::SessionResult::Status::ok ? "ok"
                         : result.status == bellgen::SessionResult::Status::aborted
                             ? "aborted"
                             : "protocol_error";
    if (opts.as_json) {
        json doc{{"status", status},
                 {"records", result.records.size()},
                 {"contiguous", result.contiguous},
                 {"message", result.message}};
        if (result.missing_index) doc["missing_index"] = *result.missing_index;
        std::cout << doc.dump(2) << '\n';
    } else {
        std::fprintf(stderr, "merge: status=%s records=%zu contiguous=%" PRIu64 "%s%s\n", status,
                     result.records.size(), result.contiguous,
                     result.message.empty() ? "" : " ", result.message.c_str());
        if (result.missing_index) {
            std::fprintf(stderr, "merge: missing sequence index %" PRIu64 "\n",
                         *result.missing_index);
        }
    }
    return result.status == bellgen::SessionResult::Status::ok ? 0 : 2;
}

int run_pair(const PairOpts& opts) {
    if (opts.role == "source") {
        if (opts.listen.empty()) {
            throw CLI::ValidationError("pair-run", "source needs --listen ADDR");
        }
        return pair_source(opts);
    }
    if (opts.role == "left") return pair_wing(opts, bellgen::Side::left);
    if (opts.role == "right") return pair_wing(opts, bellgen::Side::right);
    return pair_merge(opts);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"classical CHSH record-stream generator and analyzer"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bellgen::kVersion);

    ExactOpts exact_opts;
    auto* exact_cmd = app.add_subcommand("exact", "closed-form analytics for an angle config");
    add_angle_options(exact_cmd, exact_opts.angles);
    exact_cmd->add_option("--pattern", exact_opts.pattern, "negated CHSH term (default 22)")
        ->check(CLI::IsMember({"11", "12", "21", "22"}));
    exact_cmd->add_flag("--json", exact_opts.as_json, "machine-readable output");

    SampleOpts sample_opts;
    auto* sample_cmd = app.add_subcommand("sample", "generate a seeded record stream");
    add_angle_options(sample_cmd, sample_opts.angles);
    sample_cmd->add_option("--n", sample_opts.n, "number of records")->required();
    sample_cmd->add_option("--seed", sample_opts.seed, "stream seed (default 42)");
    sample_cmd->add_option("--shard-size", sample_opts.shard_size, "records per shard (default 65536)")
        ->check(CLI::PositiveNumber);
    sample_cmd->add_option("--workers", sample_opts.workers, "worker threads (default 1)")
        ->check(CLI::PositiveNumber);
    sample_cmd->add_option("--format", sample_opts.format, "csv|jsonl|bin (default csv)")
        ->check(CLI::IsMember({"csv", "jsonl", "bin"}));
    sample_cmd->add_option("--out", sample_opts.out, "output path (default stdout)");

    EstimateOpts estimate_opts;
    auto* estimate_cmd = app.add_subcommand("estimate", "empirical CHSH from a record stream");
    estimate_cmd->add_option("--in", estimate_opts.in, "input record file")->required();
    estimate_cmd->add_option("--format", estimate_opts.format, "csv|jsonl|bin (default csv)")
        ->check(CLI::IsMember({"csv", "jsonl", "bin"}));
    estimate_cmd->add_option("--pattern", estimate_opts.pattern, "negated CHSH term (default 22)")
        ->check(CLI::IsMember({"11", "12", "21", "22"}));
    estimate_cmd->add_option("--threshold", estimate_opts.threshold,
                             "violation threshold in standard errors (default 4)");
    estimate_cmd->add_flag("--json", estimate_opts.as_json, "machine-readable output");

    BitsOpts bits_opts;
    auto* bits_cmd = app.add_subcommand("bits", "extract a bitfile from a record stream");
    bits_cmd->add_option("--in", bits_opts.in, "input record file")->required();
    bits_cmd->add_option("--format", bits_opts.format, "csv|jsonl|bin (default csv)")
        ->check(CLI::IsMember({"csv", "jsonl", "bin"}));
    bits_cmd->add_option("--policy", bits_opts.policy, "left|right|interleaved|xor (default left)")
        ->check(CLI::IsMember({"left", "right", "interleaved", "xor"}));
    bits_cmd->add_option("--out", bits_opts.out, "output bitfile")->required();
    bits_cmd->add_flag("--json", bits_opts.as_json, "machine-readable output");

    TestOpts test_opts;
    auto* test_cmd = app.add_subcommand("test", "run the randomness battery on a bitfile");
    test_cmd->add_option("--in", test_opts.in, "input bitfile")->required();
    test_cmd->add_option("--alpha", test_opts.alpha, "significance level (default 0.01)");
    test_cmd->add_option("--block-length", test_opts.block_length,
                         "block length for block_frequency (default 128)");
    test_cmd->add_flag("--json", test_opts.as_json, "machine-readable output");

    PairOpts pair_opts;
    auto* pair_cmd = app.add_subcommand("pair-run", "distributed two-wing session over TCP");
    pair_cmd->add_option("--role", pair_opts.role, "source|left|right|merge")
        ->required()
        ->check(CLI::IsMember({"source", "left", "right", "merge"}));
    pair_cmd->add_option("--listen", pair_opts.listen, "HOST:PORT to listen on");
    pair_cmd->add_option("--connect", pair_opts.connect, "HOST:PORT to connect to");
    add_angle_options(pair_cmd, pair_opts.angles);
    pair_cmd->add_option("--n", pair_opts.n, "number of records (source)");
    pair_cmd->add_option("--seed", pair_opts.seed, "stream seed (source, default 42)");
    pair_cmd->add_option("--shard-size", pair_opts.shard_size, "records per shard (source, default 65536)")
        ->check(CLI::PositiveNumber);
    pair_cmd->add_option("--format", pair_opts.format, "merged output format (merge, default csv)")
        ->check(CLI::IsMember({"csv", "jsonl", "bin"}));
    pair_cmd->add_option("--out", pair_opts.out, "merged output path (merge)");
    pair_cmd->add_flag("--json", pair_opts.as_json, "machine-readable output (merge)");

    try {
        app.parse(argc, argv);
        if (exact_cmd->parsed()) return run_exact(exact_opts);
        if (sample_cmd->parsed()) return run_sample(sample_opts);
        if (estimate_cmd->parsed()) return run_estimate(estimate_opts);
        if (bits_cmd->parsed()) return run_bits(bits_opts);
        if (test_cmd->parsed()) return run_test(test_opts);
        if (pair_cmd->parsed()) return run_pair(pair_opts);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const bellgen::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
