#include "zkpeap/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace zkpeap {
namespace {

constexpr std::size_t kMaxFrame = 0xFFFF;

struct DuplexState {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<std::vector<uint8_t>> queues[2];  // [0]: a->b, [1]: b->a
    bool closed = false;
};

class MemoryCarrier final : public FrameCarrier {
public:
    MemoryCarrier(std::shared_ptr<DuplexState> state, int side)
        : state_(std::move(state)), side_(side) {}

    SendStatus send_frame(std::span<const uint8_t> frame) override {
        if (frame.size() > kMaxFrame) {
            return SendStatus::Oversize;
        }
        std::lock_guard lock(state_->mutex);
        if (state_->closed) {
            return SendStatus::Closed;
        }
        state_->queues[side_].emplace_back(frame.begin(), frame.end());
        state_->cv.notify_all();
        return SendStatus::Ok;
    }

    RecvResult recv_frame(std::chrono::milliseconds deadline) override {
        std::unique_lock lock(state_->mutex);
        auto& queue = state_->queues[1 - side_];
        state_->cv.wait_for(lock, deadline, [&] {
            return !queue.empty() || state_->closed;
        });
        if (!queue.empty()) {
            RecvResult result{RecvStatus::Frame, std::move(queue.front())};
            queue.pop_front();
            return result;
        }
        if (state_->closed) {
            return {RecvStatus::Closed, {}};
        }
        return {RecvStatus::Timeout, {}};
    }

    void close() override {
        std::lock_guard lock(state_->mutex);
        state_->closed = true;
        state_->cv.notify_all();
    }

private:
    std::shared_ptr<DuplexState> state_;
    int side_;
};

bool write_all(int fd, const uint8_t* data, std::size_t size) {
    while (size > 0) {
        const ssize_t n = ::write(fd, data, size);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) {
                continue;
            }
            return false;
        }
        data += n;
        size -= static_cast<std::size_t>(n);
    }
    return true;
}

enum class ReadOutcome { Ok, Timeout, Closed, Error };

// Reads exactly `size` bytes, honoring the overall deadline. A timeout that
// hits before the first byte is a clean Timeout; one that hits mid-record
// means the stream can no longer be resynchronized and is an Error.
ReadOutcome read_exact(int fd, uint8_t* data, std::size_t size,
                       std::chrono::milliseconds deadline, bool* started) {
    const auto give_up = std::chrono::steady_clock::now() + deadline;
    std::size_t got = 0;
    while (got < size) {
        const auto now = std::chrono::steady_clock::now();
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(give_up -
                                                                  now);
        pollfd pfd{fd, POLLIN, 0};
        const int pr =
            ::poll(&pfd, 1, remaining.count() < 0
                                ? 0
                                : static_cast<int>(remaining.count()));
        if (pr < 0) {
            if (errno == EINTR) {
                continue;
            }
            return ReadOutcome::Error;
        }
        if (pr == 0) {
            return (got == 0 && !*started) ? ReadOutcome::Timeout
                                           : ReadOutcome::Error;
        }
        const ssize_t n = ::read(fd, data + got, size - got);
        if (n == 0) {
            return (got == 0 && !*started) ? ReadOutcome::Closed
                                           : ReadOutcome::Error;
        }
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return ReadOutcome::Error;
        }
        *started = true;
        got += static_cast<std::size_t>(n);
    }
    return ReadOutcome::Ok;
}

class FaultCarrier final : public FrameCarrier {
public:
    FaultCarrier(std::shared_ptr<FrameCarrier> inner,
                 std::shared_ptr<FaultEngine> engine)
        : inner_(std::move(inner)), engine_(std::move(engine)) {}

    SendStatus send_frame(std::span<const uint8_t> frame) override {
        for (const auto& out : engine_->apply(frame)) {
            const SendStatus status = inner_->send_frame(out);
            if (status != SendStatus::Ok) {
                return status;
            }
        }
        return SendStatus::Ok;
    }

    RecvResult recv_frame(std::chrono::milliseconds deadline) override {
        return inner_->recv_frame(deadline);
    }

    void close() override { inner_->close(); }

private:
    std::shared_ptr<FrameCarrier> inner_;
    std::shared_ptr<FaultEngine> engine_;
};

class ObserverCarrier final : public FrameCarrier {
public:
    ObserverCarrier(std::shared_ptr<FrameCarrier> inner,
                    std::function<void(std::span<const uint8_t>)> observer)
        : inner_(std::move(inner)), observer_(std::move(observer)) {}

    SendStatus send_frame(std::span<const uint8_t> frame) override {
        const SendStatus status = inner_->send_frame(frame);
        if (status == SendStatus::Ok) {
            observer_(frame);
        }
        return status;
    }

    RecvResult recv_frame(std::chrono::milliseconds deadline) override {
        return inner_->recv_frame(deadline);
    }

    void close() override { inner_->close(); }

private:
    std::shared_ptr<FrameCarrier> inner_;
    std::function<void(std::span<const uint8_t>)> observer_;
};

}  // namespace

CarrierPair make_memory_pair() {
    auto state = std::make_shared<DuplexState>();
    return CarrierPair{std::make_shared<MemoryCarrier>(state, 0),
                       std::make_shared<MemoryCarrier>(state, 1)};
}

std::unique_ptr<TcpCarrier> TcpCarrier::connect(const std::string& host,
                                                uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &result) != 0) {
        return nullptr;
    }
    int fd = -1;
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            break;
        }
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(result);
    if (fd < 0) {
        return nullptr;
    }
    return std::unique_ptr<TcpCarrier>(new TcpCarrier(fd));
}

std::unique_ptr<TcpCarrier> TcpCarrier::from_fd(int fd) {
    return std::unique_ptr<TcpCarrier>(new TcpCarrier(fd));
}

TcpCarrier::~TcpCarrier() {
    close();
}

SendStatus TcpCarrier::send_frame(std::span<const uint8_t> frame) {
    if (frame.size() > kMaxFrame) {
        return SendStatus::Oversize;
    }
    if (fd_ < 0) {
        return SendStatus::Closed;
    }
    uint8_t prefix[2] = {static_cast<uint8_t>(frame.size() >> 8),
                         static_cast<uint8_t>(frame.size() & 0xFF)};
    if (!write_all(fd_, prefix, 2) ||
        !write_all(fd_, frame.data(), frame.size())) {
        close();
        return SendStatus::Closed;
    }
    return SendStatus::Ok;
}

RecvResult TcpCarrier::recv_frame(std::chrono::milliseconds deadline) {
    if (fd_ < 0) {
        return {RecvStatus::Closed, {}};
    }
    bool started = false;
    uint8_t prefix[2];
    switch (read_exact(fd_, prefix, 2, deadline, &started)) {
        case ReadOutcome::Ok:
            break;
        case ReadOutcome::Timeout:
            return {RecvStatus::Timeout, {}};
        case ReadOutcome::Closed:
            close();
            return {RecvStatus::Closed, {}};
        case ReadOutcome::Error:
            close();
            return {RecvStatus::Error, {}};
    }
    const std::size_t outer =
        (static_cast<std::size_t>(prefix[0]) << 8) | prefix[1];
    if (outer < 4) {
        close();
        return {RecvStatus::Error, {}};
    }
    std::vector<uint8_t> frame(outer);
    if (read_exact(fd_, frame.data(), outer, deadline, &started) !=
        ReadOutcome::Ok) {
        close();
        return {RecvStatus::Error, {}};
    }
    // The outer prefix duplicates the EAP length field; disagreement means
    // the stream is desynchronized or tampered with.
    const std::size_t inner =
        (static_cast<std::size_t>(frame[2]) << 8) | frame[3];
    if (inner != outer) {
        close();
        return {RecvStatus::Error, {}};
    }
    return {RecvStatus::Frame, std::move(frame)};
}

void TcpCarrier::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::vector<std::vector<uint8_t>> FaultEngine::apply(
    std::span<const uint8_t> frame) {
    std::vector<uint8_t> bytes(frame.begin(), frame.end());
    const std::size_t index = next_index_++;

    bool hit = false;
    FaultAction action{};
    std::size_t offset = SIZE_MAX;
    for (const auto& spec : plan_.faults) {
        if (spec.frame_index == index) {
            hit = true;
            action = spec.action;
            offset = spec.offset;
            sticky_.push_back(Sticky{bytes, action, offset});
            break;
        }
    }
    if (!hit) {
        for (const auto& sticky : sticky_) {
            if (sticky.original == bytes) {
                hit = true;
                action = sticky.action;
                offset = sticky.offset;
                break;
            }
        }
    }
    if (!hit) {
        return {std::move(bytes)};
    }

    switch (action) {
        case FaultAction::Drop:
            return {};
        case FaultAction::Duplicate:
            return {bytes, bytes};
        case FaultAction::Corrupt: {
            if (bytes.empty()) {
                return {std::move(bytes)};
            }
            const std::size_t at =
                offset == SIZE_MAX ? bytes.size() - 1
                                   : std::min(offset, bytes.size() - 1);
            bytes[at] ^= 0x01;
            return {std::move(bytes)};
        }
        case FaultAction::Truncate: {
            const std::size_t keep =
                offset == SIZE_MAX ? bytes.size() / 2
                                   : std::min(offset, bytes.size());
            bytes.resize(keep);
            return {std::move(bytes)};
        }
    }
    return {std::move(bytes)};
}

std::shared_ptr<FrameCarrier> fault_wrap(std::shared_ptr<FrameCarrier> inner,
                                         std::shared_ptr<FaultEngine> engine) {
    return std::make_shared<FaultCarrier>(std::move(inner), std::move(engine));
}

std::shared_ptr<FrameCarrier> observe_wrap(
    std::shared_ptr<FrameCarrier> inner,
    std::function<void(std::span<const uint8_t>)> observer) {
    return std::make_shared<ObserverCarrier>(std::move(inner),
                                             std::move(observer));
}

}  // namespace zkpeap
