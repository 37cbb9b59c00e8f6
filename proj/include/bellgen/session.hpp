#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bellgen/sampler.hpp"
#include "bellgen/wire.hpp"

namespace bellgen {

// Two-wing delivery harness. The source samples events and sends each wing
// only its local half (setting index and outcome), tagged with a sequence
// number; wings relay their halves to a merger that joins strictly by
// sequence number. The merged stream equals generate_stream for the same
// SeedSpec.
//
// Frame layout, identical on every transport:
//   4-byte LE length (bytes after this field) | 1-byte type |
//   8-byte LE sequence number | payload
// DATA payloads are one byte: bit0 = outcome (+1 -> 1), bit1 = setting - 1.
// END and ABORT carry the delivered-record count in the sequence field and
// no payload. HELLO frames identify a wing's role when it dials the source.

enum class MsgType : uint8_t {
    data_left = 1,
    data_right = 2,
    end = 3,
    abort = 4,
    hello_left = 5,
    hello_right = 6,
};

/// Reliable ordered byte stream between two session roles.
class Channel {
public:
    virtual ~Channel() = default;
    virtual void send(std::span<const uint8_t> bytes) = 0;
    /// Returns up to buf.size() bytes; 0 means end of stream.
    virtual size_t recv_some(std::span<uint8_t> buf) = 0;
    /// Signals end of stream to the peer; receiving stays possible.
    virtual void close_send() = 0;
};

namespace detail {

struct Pipe {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<uint8_t> data;
    bool closed = false;

    void write(std::span<const uint8_t> bytes) {
        {
            std::lock_guard lock(mutex);
            if (closed) throw channel_error("loopback: send after close");
            data.insert(data.end(), bytes.begin(), bytes.end());
        }
        ready.notify_one();
    }

    size_t read_some(std::span<uint8_t> buf) {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return !data.empty() || closed; });
        const size_t n = std::min(buf.size(), data.size());
        for (size_t k = 0; k < n; ++k) {
            buf[k] = data.front();
            data.pop_front();
        }
        return n;
    }

    void close() {
        {
            std::lock_guard lock(mutex);
            closed = true;
        }
        ready.notify_all();
    }
};

} // namespace detail

/// In-process channel endpoint. A pair shares two byte pipes; buffering is
/// unbounded, so a whole session can run store-and-forward on one thread.
class LoopbackChannel final : public Channel {
public:
    LoopbackChannel(std::shared_ptr<detail::Pipe> out, std::shared_ptr<detail::Pipe> in)
        : out_(std::move(out)), in_(std::move(in)) {}

    void send(std::span<const uint8_t> bytes) override { out_->write(bytes); }
    size_t recv_some(std::span<uint8_t> buf) override { return in_->read_some(buf); }
    void close_send() override { out_->close(); }

private:
    std::shared_ptr<detail::Pipe> out_;
    std::shared_ptr<detail::Pipe> in_;
};

inline std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_loopback_pair() {
    auto forward = std::make_shared<detail::Pipe>();
    auto backward = std::make_shared<detail::Pipe>();
    return {std::make_unique<LoopbackChannel>(forward, backward),
            std::make_unique<LoopbackChannel>(backward, forward)};
}

/// Decorator that captures every byte sent through a channel.
class RecordingChannel final : public Channel {
public:
    RecordingChannel(Channel& inner, std::vector<uint8_t>& sent_log)
        : inner_(inner), sent_log_(sent_log) {}

    void send(std::span<const uint8_t> bytes) override {
        sent_log_.insert(sent_log_.end(), bytes.begin(), bytes.end());
        inner_.send(bytes);
    }
    size_t recv_some(std::span<uint8_t> buf) override { return inner_.recv_some(buf); }
    void close_send() override { inner_.close_send(); }

private:
    Channel& inner_;
    std::vector<uint8_t>& sent_log_;
};

struct Message {
    MsgType type;
    uint64_t seq;
    std::vector<uint8_t> payload;
};

inline constexpr size_t kMaxPayload = 4096;

namespace detail {

inline size_t recv_upto(Channel& ch, std::span<uint8_t> buf) {
    size_t got = 0;
    while (got < buf.size()) {
        const size_t k = ch.recv_some(buf.subspan(got));
        if (k == 0) break;
        got += k;
    }
    return got;
}

inline void put_le(std::vector<uint8_t>& out, uint64_t v, int bytes) {
    for (int k = 0; k < bytes; ++k) out.push_back(static_cast<uint8_t>((v >> (8 * k)) & 0xFF));
}

inline uint64_t get_le(std::span<const uint8_t> in) {
    uint64_t v = 0;
    for (size_t k = 0; k < in.size(); ++k) v |= static_cast<uint64_t>(in[k]) << (8 * k);
    return v;
}

} // namespace detail

inline void write_message(Channel& ch, MsgType type, uint64_t seq,
                          std::span<const uint8_t> payload = {}) {
    std::vector<uint8_t> frame;
    frame.reserve(13 + payload.size());
    detail::put_le(frame, 1 + 8 + payload.size(), 4);
    frame.push_back(static_cast<uint8_t>(type));
    detail::put_le(frame, seq, 8);
    frame.insert(frame.end(), payload.begin(), payload.end());
    ch.send(frame);
}

/// Reads one frame. Returns nullopt on a clean end of stream at a frame
/// boundary; a stream ending mid-frame is a protocol error.
inline std::optional<Message> read_message(Channel& ch) {
    uint8_t head[4];
    const size_t got = detail::recv_upto(ch, head);
    if (got == 0) return std::nullopt;
    if (got != 4) throw protocol_error("truncated frame length");
    const uint64_t length = detail::get_le(std::span<const uint8_t>(head, 4));
    if (length < 9 || length > 9 + kMaxPayload) {
        throw protocol_error("bad frame length " + std::to_string(length));
    }
    std::vector<uint8_t> body(length);
    if (detail::recv_upto(ch, body) != length) throw protocol_error("truncated frame body");
    if (body[0] < 1 || body[0] > 6) {
        throw protocol_error("unknown message type " + std::to_string(body[0]));
    }
    Message msg{static_cast<MsgType>(body[0]),
                detail::get_le(std::span<const uint8_t>(body).subspan(1, 8)),
                std::vector<uint8_t>(body.begin() + 9, body.end())};
    return msg;
}

inline uint8_t encode_half(Setting setting, Sign outcome) {
    return static_cast<uint8_t>((outcome == Sign::plus ? 1 : 0) | ((as_int(setting) - 1) << 1));
}

inline std::pair<Setting, Sign> decode_half(uint8_t byte) {
    if (byte & 0xFC) throw protocol_error("half payload has nonzero high bits");
    return {byte & 2 ? Setting::two : Setting::one, byte & 1 ? Sign::plus : Sign::minus};
}

struct SessionConfig {
    SeedSpec seeds{};
    uint64_t n = 0;
    AngleConfig angles{};
};

struct SourceOutcome {
    bool completed = false;
    uint64_t delivered = 0; // complete pairs handed to both wings
};

enum class Side { left, right };

/// Samples the event stream (same shard contract as generate_stream) and
/// sends each wing its half. On a transport failure it sends ABORT with the
/// count of complete pairs to whichever wing is still reachable.
inline SourceOutcome run_source(const SessionConfig& cfg, Channel& to_left, Channel& to_right) {
    const OmegaSampler sampler(build_measure(cfg.angles));
    if (cfg.seeds.shard_size == 0) throw error("shard_size must be >= 1");

    const auto close_quiet = [](Channel& ch) {
        try {
            ch.close_send();
        } catch (const channel_error&) {
        }
    };
    const auto try_abort = [&](Channel& ch, uint64_t delivered) {
        try {
            write_message(ch, MsgType::abort, delivered);
        } catch (const channel_error&) {
        }
        close_quiet(ch);
    };

    Xoshiro256ss rng(shard_seed(cfg.seeds.seed, 0));
    for (uint64_t m = 0; m < cfg.n; ++m) {
        if (m > 0 && m % cfg.seeds.shard_size == 0) {
            rng = Xoshiro256ss(shard_seed(cfg.seeds.seed, m / cfg.seeds.shard_size));
        }
        const Record r = filter_record(to_six_vector(sampler.sample(rng)));
        const uint8_t left_half = encode_half(r.i, r.a);
        const uint8_t right_half = encode_half(r.j, r.b);
        try {
            write_message(to_left, MsgType::data_left, m, {&left_half, 1});
        } catch (const channel_error&) {
            close_quiet(to_left);
            try_abort(to_right, m);
            return {false, m};
        }
        try {
            write_message(to_right, MsgType::data_right, m, {&right_half, 1});
        } catch (const channel_error&) {
            close_quiet(to_right);
            try_abort(to_left, m);
            return {false, m};
        }
    }
    try {
        write_message(to_left, MsgType::end, cfg.n);
        to_left.close_send();
    } catch (const channel_error&) {
        close_quiet(to_left);
        try_abort(to_right, cfg.n);
        return {false, cfg.n};
    }
    try {
        write_message(to_right, MsgType::end, cfg.n);
        to_right.close_send();
    } catch (const channel_error&) {
        close_quiet(to_right);
        return {false, cfg.n};
    }
    return {true, cfg.n};
}

/// Relays one wing's half-stream to the merger, verifying that only frames
/// for this side arrive.
inline void run_wing(Side side, Channel& from_source, Channel& to_merge) {
    const MsgType expect = side == Side::left ? MsgType::data_left : MsgType::data_right;
    while (true) {
        const auto msg = read_message(from_source);
        if (!msg) break; // upstream vanished; merger sees the EOF
        if (msg->type == expect) {
            if (msg->payload.size() != 1) {
                throw protocol_error("wing: data payload must be one byte");
            }
            write_message(to_merge, msg->type, msg->seq, msg->payload);
        } else if (msg->type == MsgType::end || msg->type == MsgType::abort) {
            write_message(to_merge, msg->type, msg->seq, msg->payload);
            break;
        } else {
            throw protocol_error("wing: frame for the wrong side");
        }
    }
    to_merge.close_send();
}

struct SessionResult {
    enum class Status { ok, aborted, protocol_error };
    Status status = Status::ok;
    std::vector<Record> records; // merged contiguous prefix
    uint64_t contiguous = 0;
    std::optional<uint64_t> missing_index;
    std::string message;
};

namespace detail {

struct DrainState {
    std::vector<uint8_t> halves;
    bool got_end = false;
    bool got_abort = false;
    uint64_t final_seq = 0;
    std::optional<uint64_t> missing;
    bool transport_eof = false;
    std::string error_msg;
};

inline void drain_channel(Channel& ch, MsgType expect, DrainState& state) {
    try {
        uint64_t next = 0;
        while (true) {
            const auto msg = read_message(ch);
            if (!msg) {
                state.transport_eof = true;
                return;
            }
            if (msg->type == expect) {
                if (msg->seq != next) {
                    state.missing = next;
                    state.error_msg = "sequence gap: expected " + std::to_string(next) +
                                      ", got " + std::to_string(msg->seq);
                    return;
                }
                if (msg->payload.size() != 1) {
                    state.error_msg = "data payload must be one byte";
                    return;
                }
                state.halves.push_back(msg->payload[0]);
                ++next;
            } else if (msg->type == MsgType::end) {
                state.got_end = true;
                state.final_seq = msg->seq;
                return;
            } else if (msg->type == MsgType::abort) {
                state.got_abort = true;
                state.final_seq = msg->seq;
                return;
            } else {
                state.error_msg = "frame for the wrong side";
                return;
            }
        }
    } catch (const protocol_error& e) {
        state.error_msg = e.what();
    } catch (const channel_error& e) {
        state.transport_eof = true;
        state.error_msg = e.what();
    }
}

} // namespace detail

/// Joins the two half-streams by sequence number. Both channels are drained
/// concurrently so the merger never backpressures one side. Returns ok only
/// when both wings delivered a clean END covering every sequence number.
inline SessionResult run_merge(Channel& from_left, Channel& from_right) {
    detail::DrainState left, right;
    std::thread left_reader([&] { detail::drain_channel(from_left, MsgType::data_left, left); });
    detail::drain_channel(from_right, MsgType::data_right, right);
    left_reader.join();

    SessionResult result;
    const auto join_prefix = [&](uint64_t count) {
        result.records.reserve(count);
        for (uint64_t m = 0; m < count; ++m) {
            const auto [i, a] = decode_half(left.halves[m]);
            const auto [j, b] = decode_half(right.halves[m]);
            result.records.push_back(Record{a, b, i, j});
        }
        result.contiguous = count;
    };

    for (const detail::DrainState* side : {&left, &right}) {
        if (side->missing) {
            result.status = SessionResult::Status::protocol_error;
            result.missing_index = side->missing;
            result.message = side->error_msg;
            join_prefix(std::min(left.halves.size(), right.halves.size()));
            return result;
        }
        if (!side->error_msg.empty() && !side->transport_eof) {
            result.status = SessionResult::Status::protocol_error;
            result.message = side->error_msg;
            join_prefix(std::min(left.halves.size(), right.halves.size()));
            return result;
        }
    }

    if (left.got_end && right.got_end) {
        if (left.halves.size() != left.final_seq || right.halves.size() != right.final_seq ||
            left.halves.size() != right.halves.size()) {
            result.status = SessionResult::Status::protocol_error;
            result.missing_index = std::min(left.halves.size(), right.halves.size());
            result.message = "END count does not match delivered frames";
            join_prefix(std::min(left.halves.size(), right.halves.size()));
            return result;
        }
        join_prefix(left.halves.size());
        result.status = SessionResult::Status::ok;
        return result;
    }

    // An ABORT or a premature EOF on either side: keep the complete prefix.
    uint64_t count = std::min(left.halves.size(), right.halves.size());
    for (const detail::DrainState* side : {&left, &right}) {
        if (side->got_abort) count = std::min(count, side->final_seq);
    }
    join_prefix(count);
    result.status = SessionResult::Status::aborted;
    result.message = left.got_abort || right.got_abort ? "session aborted by source"
                                                       : "transport closed before END";
    return result;
}

/// Captured per-wing channel traffic (every byte the source sent).
struct SessionTrace {
    std::vector<uint8_t> to_left;
    std::vector<uint8_t> to_right;
};

/// Runs a complete session in-process over loopback channels,
/// store-and-forward: source, then each wing, then the merger.
inline SessionResult run_session(const SessionConfig& cfg, SessionTrace* trace = nullptr) {
    auto [src_left, wing_left_up] = make_loopback_pair();
    auto [src_right, wing_right_up] = make_loopback_pair();
    auto [wing_left_down, merge_left] = make_loopback_pair();
    auto [wing_right_down, merge_right] = make_loopback_pair();

    if (trace) {
        RecordingChannel rec_left(*src_left, trace->to_left);
        RecordingChannel rec_right(*src_right, trace->to_right);
        run_source(cfg, rec_left, rec_right);
    } else {
        run_source(cfg, *src_left, *src_right);
    }
    run_wing(Side::left, *wing_left_up, *wing_left_down);
    run_wing(Side::right, *wing_right_up, *wing_right_down);
    return run_merge(*merge_left, *merge_right);
}

// ---------------------------------------------------------------------------
// TCP transport (POSIX).

struct HostPort {
    std::string host;
    uint16_t port = 0;
};

inline HostPort parse_hostport(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size()) {
        throw error("address must be HOST:PORT, got '" + addr + "'");
    }
    const std::string host = addr.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
        throw error("bad port in address '" + addr + "'");
    }
    if (port < 0 || port > 65535) throw error("port out of range in '" + addr + "'");
    return HostPort{host == "localhost" ? "127.0.0.1" : host, static_cast<uint16_t>(port)};
}

class TcpChannel final : public Channel {
public:
    explicit TcpChannel(int fd) : fd_(fd) {}
    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;
    ~TcpChannel() override {
        if (fd_ >= 0) ::close(fd_);
    }

    void send(std::span<const uint8_t> bytes) override {
        size_t off = 0;
        while (off < bytes.size()) {
            const ssize_t k = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
            if (k < 0) {
                if (errno == EINTR) continue;
                throw channel_error(std::string("send: ") + std::strerror(errno));
            }
            off += static_cast<size_t>(k);
        }
    }

    size_t recv_some(std::span<uint8_t> buf) override {
        while (true) {
            const ssize_t k = ::recv(fd_, buf.data(), buf.size(), 0);
            if (k >= 0) return static_cast<size_t>(k);
            if (errno != EINTR) throw channel_error(std::string("recv: ") + std::strerror(errno));
        }
    }

    void close_send() override { ::shutdown(fd_, SHUT_WR); }

private:
    int fd_;
};

namespace detail {

inline sockaddr_in make_sockaddr(const HostPort& at) {
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(at.port);
    if (::inet_pton(AF_INET, at.host.c_str(), &sa.sin_addr) != 1) {
        throw error("bad IPv4 address: " + at.host);
    }
    return sa;
}

} // namespace detail

class TcpListener {
public:
    explicit TcpListener(const HostPort& at) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) throw channel_error(std::string("socket: ") + std::strerror(errno));
        const int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in sa = detail::make_sockaddr(at);
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
            throw channel_error("bind " + at.host + ":" + std::to_string(at.port) + ": " +
                                std::strerror(errno));
        }
        if (::listen(fd_, 4) != 0) {
            throw channel_error(std::string("listen: ") + std::strerror(errno));
        }
    }
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    ~TcpListener() {
        if (fd_ >= 0) ::close(fd_);
    }

    uint16_t port() const {
        sockaddr_in sa{};
        socklen_t len = sizeof sa;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len);
        return ntohs(sa.sin_port);
    }

    std::unique_ptr<Channel> accept() {
        while (true) {
            const int fd = ::accept(fd_, nullptr, nullptr);
            if (fd >= 0) return std::make_unique<TcpChannel>(fd);
            if (errno != EINTR) {
                throw channel_error(std::string("accept: ") + std::strerror(errno));
            }
        }
    }

private:
    int fd_ = -1;
};

/// Dials a peer, retrying while it may still be starting up.
inline std::unique_ptr<Channel> tcp_connect(const HostPort& to,
                                            std::chrono::milliseconds retry_for =
                                                std::chrono::milliseconds(10000)) {
    const auto deadline = std::chrono::steady_clock::now() + retry_for;
    sockaddr_in sa = detail::make_sockaddr(to);
    while (true) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw channel_error(std::string("socket: ") + std::strerror(errno));
        if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) == 0) {
            return std::make_unique<TcpChannel>(fd);
        }
        const int saved = errno;
        ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline) {
            throw channel_error("connect " + to.host + ":" + std::to_string(to.port) + ": " +
                                std::strerror(saved));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

} // namespace bellgen
