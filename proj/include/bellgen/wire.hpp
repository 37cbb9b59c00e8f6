#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bellgen/sampler.hpp"

namespace bellgen {

enum class Format { csv, jsonl, bin };

inline Format parse_format(const std::string& name) {
    if (name == "csv") return Format::csv;
    if (name == "jsonl") return Format::jsonl;
    if (name == "bin") return Format::bin;
    throw error("unknown format: " + name);
}

inline const char* format_name(Format f) {
    switch (f) {
        case Format::csv: return "csv";
        case Format::jsonl: return "jsonl";
        default: return "bin";
    }
}

// Binary frame: bit0 = a (+1 -> 1), bit1 = b, bit2 = i-1, bit3 = j-1,
// bits 4-7 zero.

inline uint8_t encode_frame(const Record& r) {
    return static_cast<uint8_t>((r.a == Sign::plus ? 1 : 0) | (r.b == Sign::plus ? 2 : 0) |
                                ((as_int(r.i) - 1) << 2) | ((as_int(r.j) - 1) << 3));
}

inline Record decode_frame(uint8_t byte) {
    if (byte & 0xF0) {
        throw format_error("record frame has nonzero high nibble: " + std::to_string(byte));
    }
    return Record{byte & 1 ? Sign::plus : Sign::minus, byte & 2 ? Sign::plus : Sign::minus,
                  byte & 4 ? Setting::two : Setting::one, byte & 8 ? Setting::two : Setting::one};
}

inline std::string encode_csv(const Record& r) {
    std::string row = std::to_string(as_int(r.a));
    row += ',';
    row += std::to_string(as_int(r.b));
    row += ',';
    row += std::to_string(as_int(r.i));
    row += ',';
    row += std::to_string(as_int(r.j));
    return row;
}

namespace detail {

inline int parse_int_field(std::string_view text, std::string_view row) {
    int value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw format_error("bad CSV record: " + std::string(row));
    }
    return value;
}

inline Record record_from_ints(int a, int b, int i, int j) {
    if ((a != -1 && a != 1) || (b != -1 && b != 1) || (i != 1 && i != 2) || (j != 1 && j != 2)) {
        throw format_error("record fields out of domain: a=" + std::to_string(a) +
                           " b=" + std::to_string(b) + " i=" + std::to_string(i) +
                           " j=" + std::to_string(j));
    }
    return Record{sign_from_int(a), sign_from_int(b), setting_from_int(i), setting_from_int(j)};
}

} // namespace detail

inline Record decode_csv(std::string_view row) {
    std::string_view rest = row;
    while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' ')) rest.remove_suffix(1);
    int fields[4];
    for (int k = 0; k < 4; ++k) {
        const auto comma = rest.find(',');
        if ((k < 3) != (comma != std::string_view::npos)) {
            throw format_error("bad CSV record: expected 4 fields in '" + std::string(row) + "'");
        }
        fields[k] = detail::parse_int_field(rest.substr(0, comma), row);
        if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    return detail::record_from_ints(fields[0], fields[1], fields[2], fields[3]);
}

inline std::string encode_jsonl(const Record& r) {
    std::string line = "{\"a\":";
    line += std::to_string(as_int(r.a));
    line += ",\"b\":";
    line += std::to_string(as_int(r.b));
    line += ",\"i\":";
    line += std::to_string(as_int(r.i));
    line += ",\"j\":";
    line += std::to_string(as_int(r.j));
    line += '}';
    return line;
}

inline Record decode_jsonl(std::string_view line) {
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw format_error("bad JSONL record: " + std::string(line));
    }
    for (const char* key : {"a", "b", "i", "j"}) {
        if (!obj.contains(key) || !obj[key].is_number_integer()) {
            throw format_error("JSONL record missing integer field '" + std::string(key) + "'");
        }
    }
    return detail::record_from_ints(obj["a"].get<int>(), obj["b"].get<int>(), obj["i"].get<int>(),
                                    obj["j"].get<int>());
}

inline void write_records(std::ostream& out, std::span<const Record> records, Format format) {
    switch (format) {
        case Format::csv:
            for (const Record& r : records) {
                out << encode_csv(r) << '\n';
            }
            break;
        case Format::jsonl:
            for (const Record& r : records) {
                out << encode_jsonl(r) << '\n';
            }
            break;
        case Format::bin:
            for (const Record& r : records) {
                out.put(static_cast<char>(encode_frame(r)));
            }
            break;
    }
    if (!out) throw error("record write failed");
}

inline std::vector<Record> read_records(std::istream& in, Format format) {
    std::vector<Record> records;
    if (format == Format::bin) {
        char byte;
        while (in.get(byte)) {
            records.push_back(decode_frame(static_cast<uint8_t>(byte)));
        }
        return records;
    }
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        try {
            records.push_back(format == Format::csv ? decode_csv(line) : decode_jsonl(line));
        } catch (const format_error& e) {
            throw format_error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

inline void write_record_file(const std::filesystem::path& path, std::span<const Record> records,
                              Format format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open output file: " + path.string());
    write_records(out, records, format);
}

inline std::vector<Record> read_record_file(const std::filesystem::path& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open input file: " + path.string());
    return read_records(in, format);
}

} // namespace bellgen
