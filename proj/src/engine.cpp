#include "backofflab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace backofflab {

void EngineConfig::validate() const {
  switch (policy) {
    case PolicyKind::LowSense:
      lowsense.validate();
      potential.validate(lowsense.w_min);
      break;
    case PolicyKind::Aloha:
      if (!(aloha_p > 0.0 && aloha_p <= 1.0)) {
        throw std::invalid_argument("engine: aloha_p must lie in (0, 1]");
      }
      break;
    case PolicyKind::Beb:
      break;
  }
  arrivals.validate();
  adaptive_jam.validate();
  reactive_jam.validate();
  if (horizon == 0) throw std::invalid_argument("engine: horizon must be positive");
  if (checkpoint_stride == 0) {
    throw std::invalid_argument("engine: checkpoint_stride must be positive");
  }
}

namespace {

struct LivePacket {
  PacketState low;  // LowSense and Aloha
  BebState beb;     // Beb
  SubStream rng;
};

class Engine {
 public:
  Engine(const EngineConfig& cfg, const EngineHooks& hooks)
      : cfg_(cfg),
        hooks_(hooks),
        arrivals_(make_arrivals(cfg.arrivals)),
        adaptive_(make_adaptive_jammer(cfg.adaptive_jam)),
        reactive_(make_reactive_jammer(cfg.reactive_jam)),
        arrival_rng_(rng_substream(cfg.master_seed, kArrivalEntity)),
        adaptive_rng_(rng_substream(cfg.master_seed, kAdaptiveJamEntity)) {}

  RunResult execute();

 private:
  bool lowsense() const { return cfg_.policy == PolicyKind::LowSense; }

  HistoryView history(SlotIndex t) const {
    HistoryView h;
    h.t = t;
    h.backlog = active_.size();
    h.arrivals = acc_.arrivals;
    h.successes = acc_.successes;
    h.active_slots = acc_.active_slots;
    h.jammed_slots = acc_.jammed_slots;
    h.last_state = last_state_;
    h.last_contention = last_contention_;
    return h;
  }

  void inject(std::uint32_t count, SlotIndex t) {
    for (std::uint32_t k = 0; k < count; ++k) {
      const PacketId id = ++next_id_;
      LivePacket p;
      p.low = make_packet(id, t, cfg_.lowsense);
      p.beb = make_beb_packet(id, t);
      p.rng = rng_substream(cfg_.master_seed, id);
      if (lowsense()) {
        inv_w_sum_ += 1.0 / p.low.window;
        inv_ln_sum_ += 1.0 / std::log(p.low.window);
        max_window_seen_ = std::max(max_window_seen_, p.low.window);
      } else if (cfg_.policy == PolicyKind::Beb) {
        max_window_seen_ = std::max(max_window_seen_, 1.0);
      }
      active_.push_back(std::move(p));
      packets_.push_back(PacketRecord{id, t, 0, 0});
    }
    acc_.arrivals += count;
  }

  double scan_w_max() const {
    double w = 0.0;
    for (const LivePacket& p : active_) w = std::max(w, p.low.window);
    return w;
  }

  // Largest window after the current instant, under any policy.
  double policy_w_max() const {
    if (lowsense()) return scan_w_max();
    if (cfg_.policy == PolicyKind::Beb) {
      std::uint64_t w = 0;
      for (const LivePacket& p : active_) w = std::max(w, p.beb.window);
      return static_cast<double>(w);
    }
    return 0.0;
  }

  PotentialSnapshot current_potential() const {
    if (!lowsense()) return PotentialSnapshot{};
    return potential_from_sums(active_.size(), inv_ln_sum_, scan_w_max(), cfg_.potential);
  }

  void start_interval(SlotIndex t) {
    cur_interval_ = IntervalRecord{};
    cur_interval_.start = t;
    const double w_max = scan_w_max();
    cur_interval_.tau = interval_length(w_max, active_.size(), cfg_.potential,
                                        cfg_.lowsense.w_min);
    cur_interval_.phi_start =
        potential_from_sums(active_.size(), inv_ln_sum_, w_max, cfg_.potential).phi;
    interval_end_ = t + cur_interval_.tau - 1;
    in_interval_ = true;
  }

  void finish_interval() {
    cur_interval_.phi_end = current_potential().phi;
    intervals_.push_back(cur_interval_);
    in_interval_ = false;
  }

  void emit_checkpoint(SlotIndex t) {
    Checkpoint cp;
    cp.t = t;
    cp.successes = acc_.successes;
    cp.active_slots = acc_.active_slots;
    cp.arrivals = acc_.arrivals;
    cp.jammed_slots = acc_.jammed_slots;
    cp.backlog = active_.size();
    cp.throughput = throughput(acc_);
    cp.implicit_throughput = implicit_throughput(acc_);
    cp.phi = current_potential().phi;
    cp.w_max = policy_w_max();
    checkpoints_.push_back(cp);
  }

  const EngineConfig& cfg_;
  EngineHooks hooks_;
  std::unique_ptr<ArrivalProcess> arrivals_;
  std::unique_ptr<AdaptiveJammer> adaptive_;
  std::unique_ptr<ReactiveJammer> reactive_;
  SubStream arrival_rng_;
  SubStream adaptive_rng_;

  std::vector<LivePacket> active_;
  std::vector<PacketRecord> packets_;
  MetricsAccumulator acc_;
  PacketId next_id_ = 0;

  double inv_w_sum_ = 0.0;   // running C over active windows
  double inv_ln_sum_ = 0.0;  // running H
  double max_window_seen_ = 0.0;
  std::uint64_t max_backlog_ = 0;
  SlotIndex makespan_ = 0;
  double last_contention_ = 0.0;
  std::optional<SlotState> last_state_;

  bool in_interval_ = false;
  IntervalRecord cur_interval_;
  SlotIndex interval_end_ = 0;
  IntervalLedger intervals_;
  std::vector<Checkpoint> checkpoints_;
  std::vector<TraceEvent> trace_;
};

RunResult Engine::execute() {
  cfg_.validate();
  std::vector<SlotAction> actions;
  std::vector<PacketId> senders;
  std::vector<PacketId> accessed;
  SlotIndex t = 1;
  SlotIndex end_slot = 0;
  bool truncated = false;

  for (; t <= cfg_.horizon; ++t) {
    if (active_.empty() && arrivals_->exhausted(t)) break;

    // 1. Adaptive decision, committed before any packet coin is drawn.
    const HistoryView hist = history(t);
    AdversaryDecision decision;
    decision.injections = arrivals_->injections(hist, arrival_rng_);
    decision.jam = adaptive_->jam(hist, adaptive_rng_);
    if (hooks_.on_adaptive_decision) hooks_.on_adaptive_decision(t, decision);

    // 2. Injections participate in this slot.
    inject(decision.injections, t);

    const std::uint64_t backlog_during = active_.size();
    const bool any_active = backlog_during > 0;
    if (any_active) makespan_ = t;
    max_backlog_ = std::max(max_backlog_, backlog_during);
    if (lowsense() && !in_interval_ && any_active) start_interval(t);

    // 3. Per-packet actions from per-packet substreams.
    actions.assign(active_.size(), SlotAction::Sleep);
    senders.clear();
    accessed.clear();
    for (std::size_t i = 0; i < active_.size(); ++i) {
      LivePacket& p = active_[i];
      SlotAction a = SlotAction::Sleep;
      switch (cfg_.policy) {
        case PolicyKind::LowSense:
          a = lowsense_decide(p.low, cfg_.lowsense, p.rng);
          break;
        case PolicyKind::Beb:
          a = beb_decide(p.beb);
          break;
        case PolicyKind::Aloha:
          a = aloha_decide(cfg_.aloha_p, p.rng);
          break;
      }
      if (hooks_.action_override) a = hooks_.action_override(p.low.id, t, a);
      actions[i] = a;
      if (a == SlotAction::SendAndListen) senders.push_back(p.low.id);
      if (a != SlotAction::Sleep && cfg_.trace_level == TraceLevel::FullSlots) {
        accessed.push_back(p.low.id);
      }
    }

    double con = 0.0;
    switch (cfg_.policy) {
      case PolicyKind::LowSense:
        con = inv_w_sum_;
        break;
      case PolicyKind::Beb:
        con = static_cast<double>(senders.size());
        break;
      case PolicyKind::Aloha:
        con = cfg_.aloha_p * static_cast<double>(backlog_during);
        break;
    }

    // 4. Reactive decision sees the send set, never the listeners.
    bool reactive_jam = false;
    if (reactive_) {
      reactive_jam = reactive_->jam(hist, senders);
      if (hooks_.on_reactive_decision) hooks_.on_reactive_decision(t, reactive_jam);
    }
    const bool jammed = decision.jam || reactive_jam;

    // 5. Resolve.
    const SlotOutcome outcome = resolve_slot(senders, jammed);

    std::optional<PotentialSnapshot> phi_during;
    if (cfg_.trace_level == TraceLevel::FullSlots && lowsense()) {
      phi_during = current_potential();
    }

    // 6. Feedback, updates, departure.
    std::optional<std::size_t> departed_index;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      LivePacket& p = active_[i];
      const SlotAction a = actions[i];
      switch (cfg_.policy) {
        case PolicyKind::LowSense: {
          const auto fb = feedback_for(outcome, a);
          if (!fb) break;
          const double old_w = p.low.window;
          p.low = lowsense_update(p.low, a, *fb, cfg_.lowsense);
          if (p.low.window != old_w) {
            inv_w_sum_ += 1.0 / p.low.window - 1.0 / old_w;
            inv_ln_sum_ += 1.0 / std::log(p.low.window) - 1.0 / std::log(old_w);
            max_window_seen_ = std::max(max_window_seen_, p.low.window);
          }
          break;
        }
        case PolicyKind::Beb: {
          p.beb = beb_update(p.beb, a, outcome, p.rng);
          p.low.accesses = p.beb.accesses;
          p.low.done = p.beb.done;
          max_window_seen_ =
              std::max(max_window_seen_, static_cast<double>(p.beb.window));
          break;
        }
        case PolicyKind::Aloha: {
          if (a == SlotAction::Sleep) break;
          p.low.accesses += 1;
          if (outcome.successful_sender == p.low.id) p.low.done = true;
          break;
        }
      }
      if (p.low.done) departed_index = i;
    }

    std::optional<PacketId> departed;
    if (departed_index) {
      LivePacket& p = active_[*departed_index];
      departed = p.low.id;
      packets_[p.low.id - 1].accesses = p.low.accesses;
      packets_[p.low.id - 1].completed_slot = t;
      if (lowsense()) {
        inv_w_sum_ -= 1.0 / p.low.window;
        inv_ln_sum_ -= 1.0 / std::log(p.low.window);
      }
      active_[*departed_index] = std::move(active_.back());
      active_.pop_back();
      if (lowsense() && active_.empty()) {
        // Avoid drift when the system empties.
        inv_w_sum_ = 0.0;
        inv_ln_sum_ = 0.0;
      }
    }

    // 7. Metrics and emission.
    if (any_active) acc_.active_slots += 1;
    if (jammed) acc_.jammed_slots += 1;
    if (outcome.state == SlotState::Success) acc_.successes += 1;

    if (in_interval_) {
      cur_interval_.covered += 1;
      cur_interval_.arrivals += decision.injections;
      if (jammed) cur_interval_.jams += 1;
      switch (classify_contention(con, cfg_.potential)) {
        case ContentionClass::Low: cur_interval_.low_slots += 1; break;
        case ContentionClass::Good: cur_interval_.good_slots += 1; break;
        case ContentionClass::High: cur_interval_.high_slots += 1; break;
      }
      if (t == interval_end_) finish_interval();
    }

    if (cfg_.trace_level == TraceLevel::FullSlots) {
      TraceEvent ev;
      ev.t = t;
      ev.injections = decision.injections;
      ev.adaptive_jam = decision.jam;
      ev.reactive_jam = reactive_jam;
      ev.send_count = static_cast<std::uint32_t>(senders.size());
      ev.state = outcome.state;
      ev.jammed = jammed;
      ev.departed = departed;
      ev.contention = con;
      ev.contention_class = classify_contention(con, cfg_.potential);
      ev.backlog = backlog_during;
      ev.successes = acc_.successes;
      ev.active_slots = acc_.active_slots;
      ev.arrivals = acc_.arrivals;
      ev.jammed_slots = acc_.jammed_slots;
      ev.accessed = accessed;
      std::sort(ev.accessed.begin(), ev.accessed.end());
      ev.senders = senders;
      std::sort(ev.senders.begin(), ev.senders.end());
      ev.phi = phi_during;
      if (lowsense()) ev.phi_after = current_potential();
      ev.w_max_after = policy_w_max();
      trace_.push_back(std::move(ev));
    }

    last_contention_ = con;
    last_state_ = outcome.state;
    end_slot = t;

    if (t % cfg_.checkpoint_stride == 0) emit_checkpoint(t);
  }

  if (t > cfg_.horizon && (!active_.empty() || !arrivals_->exhausted(t))) {
    truncated = true;
  }
  if (in_interval_) finish_interval();
  if (end_slot >= 1 && (checkpoints_.empty() || checkpoints_.back().t != end_slot)) {
    emit_checkpoint(end_slot);
  }

  // Flush records of packets still in the system.
  for (const LivePacket& p : active_) {
    packets_[p.low.id - 1].accesses =
        cfg_.policy == PolicyKind::Beb ? p.beb.accesses : p.low.accesses;
  }

  RunResult result;
  result.trace = std::move(trace_);
  result.checkpoints = std::move(checkpoints_);
  result.intervals = std::move(intervals_);
  result.packets = std::move(packets_);

  SummaryStats& s = result.summary;
  s.master_seed = cfg_.master_seed;
  s.arrived = acc_.arrivals;
  s.completed = acc_.successes;
  s.active_slots = acc_.active_slots;
  s.jammed_slots = acc_.jammed_slots;
  s.makespan = makespan_;
  s.end_slot = end_slot;
  s.truncated = truncated;
  s.overall_throughput = throughput(acc_);
  s.final_implicit_throughput = implicit_throughput(acc_);
  s.max_backlog = max_backlog_;
  s.max_window = max_window_seen_;
  s.final_phi = current_potential().phi;

  for (const Checkpoint& cp : result.checkpoints) {
    if (cp.implicit_throughput) {
      s.min_implicit_throughput = s.min_implicit_throughput
                                      ? std::min(*s.min_implicit_throughput,
                                                 *cp.implicit_throughput)
                                      : *cp.implicit_throughput;
    }
    s.max_phi = std::max(s.max_phi, cp.phi);
  }

  if (!result.packets.empty()) {
    std::vector<std::uint64_t> counts;
    counts.reserve(result.packets.size());
    for (const PacketRecord& r : result.packets) {
      counts.push_back(r.accesses);
      s.access_total += r.accesses;
      s.access_max = std::max(s.access_max, r.accesses);
    }
    std::sort(counts.begin(), counts.end());
    const std::size_t n = counts.size();
    s.access_median = n % 2 == 1
                          ? static_cast<double>(counts[n / 2])
                          : 0.5 * (static_cast<double>(counts[n / 2 - 1]) +
                                   static_cast<double>(counts[n / 2]));
    s.access_mean = static_cast<double>(s.access_total) / static_cast<double>(n);
  }

  s.interval_count = result.intervals.size();
  for (const IntervalRecord& iv : result.intervals) {
    if (iv.phi_end < iv.phi_start) s.intervals_decreased += 1;
  }
  return result;
}

}  // namespace

RunResult run(const EngineConfig& config, const EngineHooks& hooks) {
  Engine engine(config, hooks);
  return engine.execute();
}

}  // namespace backofflab
