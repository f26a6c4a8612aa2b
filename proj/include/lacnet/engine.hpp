#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lacnet {

using SimTime = double; // virtual seconds

enum class EventKind : uint8_t {
    TaskArrival,
    MessageDelivery, // tx confirmation visible to its consumer
    BlockSeal,
    AuctionClose,
    ComputeDone,
    MobilityTick,
    AnchorTick,
    GcsServiceDone,
    CtaRetry,
    CbbaRound,
    CbbaAssign,
    TaskDeadline,
    CheckIn,
};

const char* event_kind_name(EventKind k);

struct Event {
    SimTime fire_at = 0;
    uint64_t seq = 0; // insertion order, unique per run
    EventKind kind = EventKind::TaskArrival;
    uint64_t a = 0; // payload, meaning depends on kind
    uint64_t b = 0;
    double x = 0;
};

struct SimSummary {
    uint64_t events_processed = 0;
    SimTime final_clock = 0;
};

struct SchedulingInPast : std::logic_error {
    using std::logic_error::logic_error;
};

// Deterministic event core: virtual clock plus an ordered queue.
// Queue order is (fire_at, seq) lexicographic; seq is a stable FIFO
// tiebreaker among simultaneous events.
class Engine {
public:
    using Handler = std::function<void(const Event&)>;

    SimTime now() const { return clock_; }

    void schedule(SimTime fire_at, EventKind kind, uint64_t a = 0, uint64_t b = 0,
                  double x = 0) {
        if (fire_at < clock_) {
            throw SchedulingInPast("schedule at t=" + std::to_string(fire_at) +
                                   " before clock t=" + std::to_string(clock_));
        }
        queue_.push(Event{fire_at, next_seq_++, kind, a, b, x});
    }

    void set_handler(Handler h) { handler_ = std::move(h); }

    void set_tracing(bool on) { tracing_ = on; }
    const std::string& trace() const { return trace_; }

    // Processes all events with fire_at <= horizon. The clock ends at
    // min(horizon, last event time); an empty queue terminates early.
    SimSummary run_until(SimTime horizon) {
        SimSummary s;
        while (!queue_.empty() && queue_.top().fire_at <= horizon) {
            Event e = queue_.top();
            queue_.pop();
            clock_ = e.fire_at;
            if (tracing_) {
                std::ostringstream os;
                os << e.seq << ' ' << event_kind_name(e.kind) << ' ' << e.fire_at
                   << ' ' << e.a << ' ' << e.b << '\n';
                trace_ += os.str();
            }
            if (handler_) handler_(e);
            ++s.events_processed;
        }
        s.final_clock = clock_;
        return s;
    }

    bool empty() const { return queue_.empty(); }
    size_t pending() const { return queue_.size(); }

private:
    struct Later {
        bool operator()(const Event& l, const Event& r) const {
            if (l.fire_at != r.fire_at) return l.fire_at > r.fire_at;
            return l.seq > r.seq;
        }
    };

    SimTime clock_ = 0;
    uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    Handler handler_;
    bool tracing_ = false;
    std::string trace_;
};

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::TaskArrival: return "TaskArrival";
        case EventKind::MessageDelivery: return "MessageDelivery";
        case EventKind::BlockSeal: return "BlockSeal";
        case EventKind::AuctionClose: return "AuctionClose";
        case EventKind::ComputeDone: return "ComputeDone";
        case EventKind::MobilityTick: return "MobilityTick";
        case EventKind::AnchorTick: return "AnchorTick";
        case EventKind::GcsServiceDone: return "GcsServiceDone";
        case EventKind::CtaRetry: return "CtaRetry";
        case EventKind::CbbaRound: return "CbbaRound";
        case EventKind::CbbaAssign: return "CbbaAssign";
        case EventKind::TaskDeadline: return "TaskDeadline";
        case EventKind::CheckIn: return "CheckIn";
    }
    return "?";
}

} // namespace lacnet
