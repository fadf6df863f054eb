#include "implantsim/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "implantsim/units.hpp"

namespace implantsim {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::power_update: return "power_update";
        case EventKind::frame_start: return "frame_start";
        case EventKind::frame_end: return "frame_end";
        case EventKind::phase_transition: return "phase_transition";
        case EventKind::metric_sample: return "metric_sample";
    }
    return "?";
}

std::int64_t TdmaSchedule::slot_index(double t_s) const {
    return static_cast<std::int64_t>(t_s / slot_s);
}

const std::string& TdmaSchedule::owner_at(double t_s) const {
    if (!active()) throw std::logic_error("tdma: schedule not active");
    return order[static_cast<std::size_t>(slot_index(t_s) %
                                          static_cast<std::int64_t>(order.size()))];
}

TdmaSchedule schedule_tdma(const std::vector<std::string>& implant_ids, double slot_s) {
    if (slot_s <= 0.0) throw std::invalid_argument("schedule_tdma: slot length must be > 0");
    TdmaSchedule s;
    s.slot_s = slot_s;
    s.order = implant_ids;
    return s;
}

namespace {

std::int64_t to_ns(double t_s) { return std::llround(t_s * 1e9); }

// Scheduler operations; ranks 0..4 mirror the exported event kinds so the
// spec'd tie-break (t, kind order, node_id) falls out of the heap ordering.
enum class Op : int {
    power_update = 0,
    frame_start = 1,
    frame_end = 2,
    transition = 3,
    metric_sample = 4,
    attempt = 5,
};

struct Pending {
    std::int64_t t = 0;
    int rank = 0;
    std::string node_id;
    std::uint64_t seq = 0;
    Op op = Op::power_update;
    std::uint64_t version = 0;  // transition predictions; stale when mismatched
};

struct PendingAfter {
    bool operator()(const Pending& a, const Pending& b) const {
        if (a.t != b.t) return a.t > b.t;
        if (a.rank != b.rank) return a.rank > b.rank;
        if (a.node_id != b.node_id) return a.node_id > b.node_id;
        return a.seq > b.seq;
    }
};

struct FrameJob {
    std::int64_t req_t = 0;
    Bitstream frame;
    LinkKind link = LinkKind::backscatter;
};

enum class Activity { idle, backscatter_frame, galvanic_frame };

struct NodeRt {
    const NodeConfig* cfg = nullptr;
    bool is_implant = false;
    HarvesterState hs;
    double p_dc_w = 0.0;
    double p_rx_dbm = 0.0;
    double depth_cm = 0.0;
    LoadSet requested = 0;
    std::int64_t last_t = 0;
    Activity act = Activity::idle;
    std::int64_t busy_until = -1;
    std::uint64_t version = 0;
    std::vector<FrameJob> queue;
    std::size_t q_head = 0;
    bool waiting_running = false;
    NodeMetrics m;
};

class Engine {
  public:
    explicit Engine(const Scenario& sc) : sc_(sc), end_ns_(to_ns(sc.duration_s)) {}

    Trace run_all() {
        build_nodes();
        ingest_traffic();
        for (auto& [id, rt] : nodes_) {
            if (rt.is_implant)
                push({0, static_cast<int>(Op::power_update), id, next_seq(),
                      Op::power_update});
        }
        if (sc_.metric_sample_s > 0.0) {
            const std::int64_t tick = to_ns(sc_.metric_sample_s);
            for (std::int64_t t = tick; t < end_ns_; t += tick)
                for (auto& [id, rt] : nodes_)
                    push({t, static_cast<int>(Op::metric_sample), id, next_seq(),
                          Op::metric_sample});
        }
        for (auto& [id, rt] : nodes_)
            push({end_ns_, static_cast<int>(Op::metric_sample), id, next_seq(),
                  Op::metric_sample});

        std::int64_t prev_t = 0;
        while (!heap_.empty()) {
            const Pending p = heap_.top();
            heap_.pop();
            if (p.t < prev_t) throw std::logic_error("netsim: event processed out of order");
            prev_t = p.t;
            dispatch(p);
        }

        // Frames still queued at the end resolve as dropped.
        for (auto& [id, rt] : nodes_) {
            for (std::size_t i = rt.q_head; i < rt.queue.size(); ++i) {
                rt.m.offered_bits += rt.queue[i].frame.bits;
                std::ostringstream d;
                d << "link=" << link_name(rt.queue[i].link)
                  << " offered=" << rt.queue[i].frame.bits
                  << " delivered=0 dropped=unsent";
                emit(end_ns_, EventKind::frame_end, id, d.str(), rt.queue[i].frame.bits, 0);
            }
        }

        Trace tr;
        tr.duration_s = sc_.duration_s;
        tr.events = std::move(events_);
        for (auto& [id, rt] : nodes_) {
            rt.m.harvested_j = rt.hs.ledger.harvested_j;
            rt.m.consumed_j = rt.hs.ledger.consumed_j;
            rt.m.emitted_galvanic_j = rt.hs.ledger.emitted_galvanic_j;
            tr.metrics[id] = rt.m;
        }
        return tr;
    }

  private:
    const Scenario& sc_;
    std::int64_t end_ns_;
    std::map<std::string, NodeRt> nodes_;
    const NodeConfig* reader_ = nullptr;
    std::priority_queue<Pending, std::vector<Pending>, PendingAfter> heap_;
    std::vector<Event> events_;
    std::uint64_t seq_ = 0;

    static const char* link_name(LinkKind k) {
        return k == LinkKind::backscatter ? "backscatter" : "galvanic";
    }

    std::uint64_t next_seq() { return seq_++; }

    void push(Pending p) {
        if (p.t > end_ns_) return;
        heap_.push(std::move(p));
    }

    void build_nodes() {
        for (const NodeConfig& cfg : sc_.nodes) {
            NodeRt rt;
            rt.cfg = &cfg;
            rt.is_implant = cfg.kind != NodeKind::reader;
            if (!rt.is_implant) reader_ = &cfg;
            nodes_.emplace(cfg.node_id, std::move(rt));
        }
        for (auto& [id, rt] : nodes_) {
            if (!rt.is_implant) continue;
            const ImplantNodeConfig& ic = rt.cfg->implant;
            rt.hs = HarvesterState::make(ic.storage, ic.loads);
            rt.depth_cm = rt.cfg->position_mm[2] / 10.0;
            const double coupling =
                sc_.coupling.coupling_db(reader_->carrier_hz, rt.cfg->position_mm[2]);
            rt.p_rx_dbm = received_power_dbm(reader_->tx_dbm, coupling);
            rt.p_dc_w = rectify(ic.rectifier, dbm_to_watt(rt.p_rx_dbm));
            rt.requested = kIdleRunningLoads;
            if (ic.loads.sensor.power_w > 0.0) rt.requested |= kLoadSensor;
            rt.m.v_min = rt.m.v_max = rt.hs.cap.voltage_v;
        }
    }

    void ingest_traffic() {
        // xorshift-based jitter keeps seeded runs platform-stable.
        std::uint64_t x = sc_.seed ? sc_.seed : 0x9e3779b97f4a7c15ull;
        auto next_uniform = [&x]() {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            return static_cast<double>(x >> 11) * 0x1.0p-53;
        };
        std::vector<std::pair<std::int64_t, const TrafficEntry*>> entries;
        entries.reserve(sc_.traffic.size());
        for (const TrafficEntry& te : sc_.traffic) {
            double t = te.t_s;
            if (sc_.traffic_jitter_s > 0.0) t += next_uniform() * sc_.traffic_jitter_s;
            entries.emplace_back(to_ns(t), &te);
        }
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& a, const auto& b) {
                             if (a.first != b.first) return a.first < b.first;
                             return a.second->source < b.second->source;
                         });
        for (const auto& [t, te] : entries)
            nodes_.at(te->source).queue.push_back(FrameJob{t, te->frame, te->link});
        for (auto& [id, rt] : nodes_) {
            if (!rt.queue.empty())
                push({rt.queue.front().req_t, static_cast<int>(Op::attempt), id,
                      next_seq(), Op::attempt});
        }
    }

    double harvest_power(const NodeRt& rt) const {
        return rt.act == Activity::backscatter_frame ? sc_.backscatter.duty * rt.p_dc_w
                                                     : rt.p_dc_w;
    }

    // Closed-form advance to t; conditions are constant across the interval by
    // construction (threshold crossings are events of their own). Returns true
    // when the phase flipped at the endpoint.
    bool advance(NodeRt& rt, std::int64_t t) {
        if (!rt.is_implant || t <= rt.last_t) {
            rt.last_t = std::max(rt.last_t, t);
            return false;
        }
        const double dt = static_cast<double>(t - rt.last_t) * 1e-9;
        const Phase old = rt.hs.phase;
        rt.hs = advance_exact(rt.hs, dt, harvest_power(rt), rt.requested);
        switch (old) {
            case Phase::off: rt.m.t_off_s += dt; break;
            case Phase::charging: rt.m.t_charging_s += dt; break;
            case Phase::running: rt.m.t_running_s += dt; break;
        }
        rt.m.v_min = std::min(rt.m.v_min, rt.hs.cap.voltage_v);
        rt.m.v_max = std::max(rt.m.v_max, rt.hs.cap.voltage_v);
        rt.last_t = t;
        return rt.hs.phase != old;
    }

    void emit(std::int64_t t, EventKind kind, const std::string& id, std::string detail,
              std::int64_t offered = 0, std::int64_t delivered = 0) {
        const NodeRt& rt = nodes_.at(id);
        Event ev;
        ev.t_ns = t;
        ev.kind = kind;
        ev.node = id;
        ev.detail = std::move(detail);
        ev.v_cap = rt.hs.cap.voltage_v;
        ev.phase = rt.hs.phase;
        ev.ledger = rt.hs.ledger;
        ev.offered_bits = offered;
        ev.delivered_bits = delivered;
        events_.push_back(std::move(ev));
    }

    void on_phase_flip(NodeRt& rt, const std::string& id, std::int64_t t, Phase old) {
        std::ostringstream d;
        d << phase_name(old) << "->" << phase_name(rt.hs.phase);
        emit(t, EventKind::phase_transition, id, d.str());
        rt.version++;
        schedule_transition(rt, id, t);
        if (rt.waiting_running && rt.hs.phase == Phase::running) {
            rt.waiting_running = false;
            push({t, static_cast<int>(Op::attempt), id, next_seq(), Op::attempt});
        }
    }

    // Predicts the next voltage-threshold crossing under the current constant
    // conditions and schedules it (1 ns resolution, rounded up).
    void schedule_transition(NodeRt& rt, const std::string& id, std::int64_t now) {
        if (!rt.is_implant) return;
        const double p_net = harvest_power(rt) - active_load_power(rt.hs, rt.requested) -
                             rt.hs.cap.leakage_w;
        const double e = rt.hs.cap.energy_j();
        const double c = rt.hs.cap.capacitance_f;

        double e_target = -1.0;
        if (rt.hs.phase != Phase::running) {
            if (p_net > 0.0 && rt.hs.cap.voltage_v < rt.hs.v_on)
                e_target = StorageCap::energy_at(c, rt.hs.v_on);
        } else {
            const PowerLoad& sensor = rt.hs.loads.sensor;
            const bool sensor_gated = (rt.requested & kLoadSensor) != 0 &&
                                      sensor.min_voltage_v > rt.hs.v_off &&
                                      sensor.min_voltage_v < rt.hs.v_on;
            if (p_net < 0.0) {
                e_target = StorageCap::energy_at(c, rt.hs.v_off);
                if (sensor_gated && rt.hs.cap.voltage_v >= sensor.min_voltage_v)
                    e_target =
                        std::max(e_target, StorageCap::energy_at(c, sensor.min_voltage_v));
            } else if (p_net > 0.0 && sensor_gated &&
                       rt.hs.cap.voltage_v < sensor.min_voltage_v) {
                e_target = StorageCap::energy_at(c, sensor.min_voltage_v);
            }
        }
        if (e_target < 0.0) return;
        const double dt = (e_target - e) / p_net;
        if (!std::isfinite(dt) || dt < 0.0) return;
        const std::int64_t step_ns =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(dt * 1e9)));
        push({now + step_ns, static_cast<int>(Op::transition), id, next_seq(),
              Op::transition, rt.version});
    }

    void dispatch(const Pending& p) {
        NodeRt& rt = nodes_.at(p.node_id);
        switch (p.op) {
            case Op::power_update: {
                const Phase old = rt.hs.phase;
                advance(rt, p.t);
                std::ostringstream d;
                d << "p_rx_dbm=" << rt.p_rx_dbm << " p_dc_uw=" << rt.p_dc_w * 1e6;
                emit(p.t, EventKind::power_update, p.node_id, d.str());
                if (rt.hs.phase == Phase::off && rt.p_dc_w > 0.0) {
                    rt.hs.phase = Phase::charging;
                    std::ostringstream td;
                    td << phase_name(old) << "->" << phase_name(rt.hs.phase);
                    emit(p.t, EventKind::phase_transition, p.node_id, td.str());
                }
                rt.version++;
                schedule_transition(rt, p.node_id, p.t);
                break;
            }
            case Op::transition: {
                if (p.version != rt.version) break;  // conditions changed meanwhile
                const Phase old = rt.hs.phase;
                const double v_before = rt.hs.cap.voltage_v;
                const double s_min = rt.hs.loads.sensor.min_voltage_v;
                if (advance(rt, p.t)) {
                    on_phase_flip(rt, p.node_id, p.t, old);
                } else if (rt.hs.phase == Phase::running &&
                           (v_before < s_min) != (rt.hs.cap.voltage_v < s_min)) {
                    // Sensor gate crossed: power changes without a phase change.
                    emit(p.t, EventKind::power_update, p.node_id, "load_change=sensor");
                    rt.version++;
                    schedule_transition(rt, p.node_id, p.t);
                } else {
                    // ns rounding left the threshold a hair away; try again.
                    rt.version++;
                    schedule_transition(rt, p.node_id, p.t);
                }
                break;
            }
            case Op::attempt:
                attempt_frame(rt, p.node_id, p.t);
                break;
            case Op::frame_end:
                finish_frame(rt, p.node_id, p.t);
                break;
            case Op::frame_start:
                break;  // emitted inline by attempt_frame
            case Op::metric_sample: {
                const Phase old = rt.hs.phase;
                if (advance(rt, p.t)) on_phase_flip(rt, p.node_id, p.t, old);
                emit(p.t, EventKind::metric_sample, p.node_id, "");
                break;
            }
        }
    }

    void drop_frame(NodeRt& rt, const std::string& id, std::int64_t t,
                    const char* reason) {
        const FrameJob& job = rt.queue[rt.q_head];
        rt.m.offered_bits += job.frame.bits;
        std::ostringstream d;
        d << "link=" << link_name(job.link) << " offered=" << job.frame.bits
          << " delivered=0 dropped=" << reason;
        emit(t, EventKind::frame_end, id, d.str(), job.frame.bits, 0);
        rt.q_head++;
        attempt_next(rt, id, t);
    }

    void attempt_frame(NodeRt& rt, const std::string& id, std::int64_t t) {
        if (rt.q_head >= rt.queue.size()) return;
        const FrameJob& job = rt.queue[rt.q_head];
        if (job.req_t > t) {
            push({job.req_t, static_cast<int>(Op::attempt), id, next_seq(), Op::attempt});
            return;
        }
        std::int64_t busiest = rt.busy_until;
        if (sc_.tdma.active()) {
            // A schedule serializes the whole channel, not just this implant.
            for (const auto& [oid, other] : nodes_)
                busiest = std::max(busiest, other.busy_until);
        }
        if (busiest >= t) {
            push({busiest + 1, static_cast<int>(Op::attempt), id, next_seq(), Op::attempt});
            return;
        }
        if (sc_.tdma.active()) {
            const std::int64_t slot_t = next_owned_ns(id, t);
            if (slot_t < 0) {
                drop_frame(rt, id, t, "no_slot");
                return;
            }
            if (slot_t > t) {
                push({slot_t, static_cast<int>(Op::attempt), id, next_seq(), Op::attempt});
                return;
            }
        }
        const Phase old = rt.hs.phase;
        if (advance(rt, t)) on_phase_flip(rt, id, t, old);
        if (rt.hs.phase != Phase::running) {
            rt.waiting_running = true;  // retried on the next RUNNING transition
            return;
        }
        const std::int64_t dur = to_ns(job.frame.duration_s());
        if (t + dur > end_ns_) {
            drop_frame(rt, id, t, "scenario_end");
            return;
        }
        rt.act = job.link == LinkKind::backscatter ? Activity::backscatter_frame
                                                   : Activity::galvanic_frame;
        rt.busy_until = t + dur;
        rt.version++;
        schedule_transition(rt, id, t);
        std::ostringstream d;
        d << "link=" << link_name(job.link) << " bits=" << job.frame.bits;
        emit(t, EventKind::frame_start, id, d.str(), job.frame.bits);
        push({t + dur, static_cast<int>(Op::frame_end), id, next_seq(), Op::frame_end});
    }

    void attempt_next(NodeRt& rt, const std::string& id, std::int64_t t) {
        if (rt.q_head < rt.queue.size())
            push({std::max(t + 1, rt.queue[rt.q_head].req_t),
                  static_cast<int>(Op::attempt), id, next_seq(), Op::attempt});
    }

    // Earliest time >= t inside a slot owned by id; -1 when none before end.
    std::int64_t next_owned_ns(const std::string& id, std::int64_t t) const {
        const std::int64_t slot_ns = to_ns(sc_.tdma.slot_s);
        const std::int64_t n = static_cast<std::int64_t>(sc_.tdma.order.size());
        std::int64_t mine = -1;
        for (std::int64_t i = 0; i < n; ++i)
            if (sc_.tdma.order[static_cast<std::size_t>(i)] == id) mine = i;
        if (mine < 0) return -1;
        const std::int64_t s = t / slot_ns;
        const std::int64_t j = s + ((mine - (s % n)) + n) % n;
        const std::int64_t start = (j == s) ? t : j * slot_ns;
        return start <= end_ns_ ? start : -1;
    }

    void finish_frame(NodeRt& rt, const std::string& id, std::int64_t t) {
        const Phase old = rt.hs.phase;
        if (advance(rt, t)) on_phase_flip(rt, id, t, old);

        const FrameJob& job = rt.queue[rt.q_head];
        std::ostringstream d;
        std::int64_t delivered = 0;
        std::vector<std::string> receivers;
        if (job.link == LinkKind::backscatter) {
            const DetectionResult det =
                backscatter_detect(sc_.backscatter, reader_->tx_dbm, rt.depth_cm);
            delivered = det.detected ? job.frame.bits : 0;
            if (delivered > 0) {
                receivers.push_back(reader_->node_id);
                nodes_.at(reader_->node_id).m.received_bits += delivered;
            }
            d << "link=backscatter offered=" << job.frame.bits
              << " delivered=" << delivered << " margin_db=" << det.margin;
        } else {
            std::int64_t pulses = 0;
            for (std::int64_t i = 0; i < job.frame.bits; ++i) {
                const PulseResult pr =
                    galvanic_pulse_budget(rt.hs, sc_.galvanic.pulse_energy_j);
                if (!pr.allowed) break;
                rt.hs = pr.state;
                ++pulses;
            }
            for (auto& [oid, other] : nodes_) {
                if (oid == id || !other.is_implant) continue;
                const double dist_cm = distance_cm(*rt.cfg, *other.cfg);
                if (pulses > 0 && galvanic_rx_detect(sc_.galvanic, dist_cm).detected) {
                    receivers.push_back(oid);
                    other.m.received_bits += pulses;
                }
            }
            delivered = receivers.empty() ? 0 : pulses;
            d << "link=galvanic offered=" << job.frame.bits << " pulses=" << pulses
              << " delivered=" << delivered << " receivers=" << receivers.size();
        }
        rt.m.offered_bits += job.frame.bits;
        rt.m.delivered_bits += delivered;
        rt.act = Activity::idle;
        rt.busy_until = t;
        rt.version++;
        schedule_transition(rt, id, t);
        emit(t, EventKind::frame_end, id, d.str(), job.frame.bits, delivered);
        events_.back().receivers = std::move(receivers);
        rt.q_head++;
        attempt_next(rt, id, t);
    }

    static double distance_cm(const NodeConfig& a, const NodeConfig& b) {
        const double dx = a.position_mm[0] - b.position_mm[0];
        const double dy = a.position_mm[1] - b.position_mm[1];
        const double dz = a.position_mm[2] - b.position_mm[2];
        return std::sqrt(dx * dx + dy * dy + dz * dz) / 10.0;
    }
};

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& sc) {
    std::vector<std::string> bad;
    if (sc.duration_s <= 0.0) bad.push_back("duration must be > 0");

    std::set<std::string> ids;
    int readers = 0;
    for (const NodeConfig& n : sc.nodes) {
        if (n.node_id.empty()) bad.push_back("node with empty id");
        if (!ids.insert(n.node_id).second)
            bad.push_back("duplicate node id '" + n.node_id + "'");
        if (n.kind == NodeKind::reader) {
            ++readers;
        } else {
            if (n.position_mm[2] <= 0.0)
                bad.push_back("implant '" + n.node_id + "' must have depth z > 0");
            if (n.implant.matching_q < 1.0)
                bad.push_back("implant '" + n.node_id + "' matching Q must be >= 1");
        }
    }
    if (readers != 1) bad.push_back("scenario requires exactly one reader node");
    for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < sc.nodes.size(); ++j) {
            if (sc.nodes[i].kind == NodeKind::reader ||
                sc.nodes[j].kind == NodeKind::reader)
                continue;
            if (sc.nodes[i].position_mm == sc.nodes[j].position_mm)
                bad.push_back("implants '" + sc.nodes[i].node_id + "' and '" +
                              sc.nodes[j].node_id + "' share a position");
        }
    }

    try {
        sc.stack.validate();
    } catch (const std::exception& e) {
        bad.emplace_back(e.what());
    }
    try {
        sc.backscatter.validate();
    } catch (const std::exception& e) {
        bad.emplace_back(e.what());
    }
    try {
        sc.galvanic.validate();
    } catch (const std::exception& e) {
        bad.emplace_back(e.what());
    }

    for (std::size_t i = 0; i < sc.traffic.size(); ++i) {
        const TrafficEntry& te = sc.traffic[i];
        const std::string tag = "traffic[" + std::to_string(i) + "]";
        if (te.t_s < 0.0 || te.t_s > sc.duration_s)
            bad.push_back(tag + " time outside scenario duration");
        auto it = std::find_if(sc.nodes.begin(), sc.nodes.end(),
                               [&](const NodeConfig& n) { return n.node_id == te.source; });
        if (it == sc.nodes.end())
            bad.push_back(tag + " references unknown source '" + te.source + "'");
        else if (it->kind == NodeKind::reader)
            bad.push_back(tag + " source must be an implant");
        try {
            te.frame.validate(te.link == LinkKind::backscatter ? sc.backscatter.subcarrier_hz
                                                               : 0.0);
        } catch (const std::exception& e) {
            bad.push_back(tag + ": " + std::string(e.what()));
        }
        if (te.t_s + te.frame.duration_s() > sc.duration_s)
            bad.push_back(tag + " frame would extend past the scenario end");
    }
    if (sc.tdma.slot_s < 0.0) bad.push_back("tdma slot length must be >= 0");
    if (sc.metric_sample_s < 0.0) bad.push_back("metric sample interval must be >= 0");
    if (sc.traffic_jitter_s < 0.0) bad.push_back("traffic jitter must be >= 0");
    return bad;
}

Trace run(const Scenario& sc) {
    const std::vector<std::string> bad = validate_scenario(sc);
    if (!bad.empty()) {
        std::string msg = "scenario validation failed:";
        for (const std::string& b : bad) msg += "\n - " + b;
        throw std::invalid_argument(msg);
    }
    Engine eng(sc);
    return eng.run_all();
}

std::map<std::string, NodeMetrics> recompute_metrics(const Trace& trace) {
    std::map<std::string, NodeMetrics> out;
    struct PhaseTrack {
        Phase phase = Phase::off;
        std::int64_t since = 0;
        bool implant = false;
        bool seen_voltage = false;
    };
    std::map<std::string, PhaseTrack> tracks;
    const std::int64_t end_ns = to_ns(trace.duration_s);

    for (const Event& ev : trace.events) {
        NodeMetrics& m = out[ev.node];
        PhaseTrack& tk = tracks[ev.node];
        if (ev.kind == EventKind::power_update) tk.implant = true;
        if (tk.implant) {
            if (!tk.seen_voltage) {
                m.v_min = m.v_max = ev.v_cap;
                tk.seen_voltage = true;
            }
            m.v_min = std::min(m.v_min, ev.v_cap);
            m.v_max = std::max(m.v_max, ev.v_cap);
            m.harvested_j = ev.ledger.harvested_j;
            m.consumed_j = ev.ledger.consumed_j;
            m.emitted_galvanic_j = ev.ledger.emitted_galvanic_j;
        }
        if (ev.kind == EventKind::phase_transition) {
            const double dt = static_cast<double>(ev.t_ns - tk.since) * 1e-9;
            switch (tk.phase) {
                case Phase::off: m.t_off_s += dt; break;
                case Phase::charging: m.t_charging_s += dt; break;
                case Phase::running: m.t_running_s += dt; break;
            }
            tk.phase = ev.phase;
            tk.since = ev.t_ns;
        }
        if (ev.kind == EventKind::frame_end) {
            m.offered_bits += ev.offered_bits;
            m.delivered_bits += ev.delivered_bits;
            for (const std::string& rx : ev.receivers)
                out[rx].received_bits += ev.delivered_bits;
        }
    }
    for (auto& [id, tk] : tracks) {
        if (!tk.implant) continue;
        NodeMetrics& m = out[id];
        const double dt = static_cast<double>(end_ns - tk.since) * 1e-9;
        switch (tk.phase) {
            case Phase::off: m.t_off_s += dt; break;
            case Phase::charging: m.t_charging_s += dt; break;
            case Phase::running: m.t_running_s += dt; break;
        }
    }
    return out;
}

Report summarize(const Trace& trace) {
    Report rep;
    for (const auto& [id, m] : trace.metrics) {
        NodeReport r;
        r.throughput_bps = trace.duration_s > 0.0
                               ? static_cast<double>(m.delivered_bits) / trace.duration_s
                               : 0.0;
        r.j_per_bit = m.delivered_bits > 0
                          ? m.consumed_j / static_cast<double>(m.delivered_bits)
                          : std::numeric_limits<double>::infinity();
        r.availability = trace.duration_s > 0.0 ? m.t_running_s / trace.duration_s : 0.0;
        rep.nodes[id] = r;
    }
    return rep;
}

}  // namespace implantsim
