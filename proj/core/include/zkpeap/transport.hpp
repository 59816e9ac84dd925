#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace zkpeap {

enum class SendStatus : uint8_t { Ok, Closed, Oversize };

enum class RecvStatus : uint8_t { Frame, Timeout, Closed, Error };

struct RecvResult {
    RecvStatus status;
    std::vector<uint8_t> frame;  // set when status == Frame
};

/// Duplex endpoint delivering whole EAP frames in order. Implementations
/// surface explicit errors; a partial frame is never handed to the caller.
class FrameCarrier {
public:
    virtual ~FrameCarrier() = default;

    virtual SendStatus send_frame(std::span<const uint8_t> frame) = 0;

    /// Blocks up to `deadline` for the next frame. A zero deadline polls.
    /// Timeout leaves the carrier usable; Closed and Error are terminal.
    virtual RecvResult recv_frame(std::chrono::milliseconds deadline) = 0;

    virtual void close() = 0;
};

/// Connected pair of in-memory endpoints, for tests and the deterministic
/// simulator. Thread-safe; a zero-deadline recv makes it usable from a
/// single-threaded driver with virtual time.
struct CarrierPair {
    std::shared_ptr<FrameCarrier> first;
    std::shared_ptr<FrameCarrier> second;
};
CarrierPair make_memory_pair();

/// TCP profile. On the wire every EAP frame is prefixed with a 2-octet
/// big-endian length; the prefix must agree with the frame's own length
/// field or the connection is dropped as corrupt. Default port 7784.
class TcpCarrier final : public FrameCarrier {
public:
    // Returns nullptr on connect failure.
    static std::unique_ptr<TcpCarrier> connect(const std::string& host,
                                               uint16_t port);
    // Adopts an already-accepted socket.
    static std::unique_ptr<TcpCarrier> from_fd(int fd);

    ~TcpCarrier() override;

    SendStatus send_frame(std::span<const uint8_t> frame) override;
    RecvResult recv_frame(std::chrono::milliseconds deadline) override;
    void close() override;

private:
    explicit TcpCarrier(int fd) : fd_(fd) {}

    int fd_;
};

enum class FaultAction : uint8_t { Drop, Duplicate, Corrupt, Truncate };

struct FaultSpec {
    std::size_t frame_index;  // position in global send order
    FaultAction action;
    // Corrupt: byte offset whose low bit is flipped; Truncate: bytes kept.
    // SIZE_MAX picks a default (last byte / half the frame).
    std::size_t offset = SIZE_MAX;
};

struct FaultPlan {
    std::vector<FaultSpec> faults;
};

/// Deterministic fault injection keyed by a global frame send index shared
/// between both wrapped endpoints. A fault is sticky: once it hits a frame,
/// byte-identical retransmissions of that frame receive the same treatment,
/// so a dropped response stays dropped however often the authenticator asks
/// again.
class FaultEngine {
public:
    explicit FaultEngine(FaultPlan plan) : plan_(std::move(plan)) {}

    // Frames to actually deliver in place of `frame` (0, 1 or 2 of them).
    std::vector<std::vector<uint8_t>> apply(std::span<const uint8_t> frame);

private:
    FaultPlan plan_;
    std::size_t next_index_ = 0;
    struct Sticky {
        std::vector<uint8_t> original;
        FaultAction action;
        std::size_t offset;
    };
    std::vector<Sticky> sticky_;
};

std::shared_ptr<FrameCarrier> fault_wrap(std::shared_ptr<FrameCarrier> inner,
                                         std::shared_ptr<FaultEngine> engine);

/// Invokes `observer` for every frame actually handed to the inner carrier
/// (i.e. after fault injection when stacked outside a fault wrapper).
std::shared_ptr<FrameCarrier> observe_wrap(
    std::shared_ptr<FrameCarrier> inner,
    std::function<void(std::span<const uint8_t>)> observer);

}  // namespace zkpeap
