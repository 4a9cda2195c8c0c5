#include "backofflab/adversary.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace backofflab {

std::uint64_t QueuingConstraint::budget() const {
  return static_cast<std::uint64_t>(std::floor(lambda * static_cast<double>(granularity)));
}

void QueuingConstraint::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("queuing: lambda must lie in (0, 1)");
  }
  if (granularity == 0) throw std::invalid_argument("queuing: granularity must be positive");
}

void ArrivalSpec::validate() const {
  switch (kind) {
    case Kind::Batch:
      if (batch_n == 0) throw std::invalid_argument("arrivals: batch size must be >= 1");
      break;
    case Kind::Bernoulli:
      if (!(rate >= 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("arrivals: bernoulli rate must lie in [0, 1]");
      }
      break;
    case Kind::Queuing:
      constraint.validate();
      break;
  }
}

void AdaptiveJamSpec::validate() const {
  if (kind == Kind::Random && !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("adaptive jam: probability must lie in [0, 1]");
  }
  if (kind == Kind::ContentionTriggered && !(threshold >= 0.0)) {
    throw std::invalid_argument("adaptive jam: threshold must be nonnegative");
  }
}

void ReactiveJamSpec::validate() const {}

namespace {

class BatchArrivals final : public ArrivalProcess {
 public:
  explicit BatchArrivals(std::uint64_t n) : n_(n) {}
  std::uint32_t injections(const HistoryView& history, SubStream&) override {
    return history.t == 1 ? static_cast<std::uint32_t>(n_) : 0;
  }
  bool exhausted(SlotIndex t) const override { return t > 1; }

 private:
  std::uint64_t n_;
};

class BernoulliArrivals final : public ArrivalProcess {
 public:
  BernoulliArrivals(double rate, std::optional<SlotIndex> until) : rate_(rate), until_(until) {}
  std::uint32_t injections(const HistoryView& history, SubStream& rng) override {
    if (until_ && history.t > *until_) return 0;
    // One draw per eligible slot keeps the stream reproducible.
    return rng.next_double() < rate_ ? 1 : 0;
  }
  bool exhausted(SlotIndex t) const override { return until_ && t > *until_; }

 private:
  double rate_;
  std::optional<SlotIndex> until_;
};

// Trailing-window admission: an injection at slot t is allowed only if the
// window (t-S, t] stays within budget. Every other length-S window ends at
// some slot t' >= its last injection t_last and contains only injections
// from (t_last - S, t_last], so admission at each injection bounds all
// windows.
class SlidingBudget {
 public:
  explicit SlidingBudget(const QueuingConstraint& c)
      : granularity_(c.granularity), budget_(c.budget()) {}

  bool admit(SlotIndex t) {
    while (!recent_.empty() && recent_.front() + granularity_ <= t) recent_.pop_front();
    if (recent_.size() >= budget_) return false;
    recent_.push_back(t);
    return true;
  }

 private:
  SlotIndex granularity_;
  std::uint64_t budget_;
  std::deque<SlotIndex> recent_;
};

// FrontLoaded and Spread emit fixed per-era offsets within consecutive
// blocks of S slots; both keep every sliding window within budget because
// each era's load sits in a prefix (or an evenly spaced subset) of the era.
class PatternedQueuingArrivals final : public ArrivalProcess {
 public:
  PatternedQueuingArrivals(const QueuingConstraint& c, QueuingPattern pattern,
                           std::optional<SlotIndex> until)
      : constraint_(c), pattern_(pattern), until_(until) {}

  std::uint32_t injections(const HistoryView& history, SubStream&) override {
    const SlotIndex t = history.t;
    if (until_ && t > *until_) return 0;
    const std::uint64_t s = constraint_.granularity;
    const std::uint64_t budget = constraint_.budget();
    if (budget == 0) return 0;
    const std::uint64_t offset = (t - 1) % s;  // position within the current era
    if (pattern_ == QueuingPattern::FrontLoaded) {
      return offset < budget ? 1 : 0;
    }
    const std::uint64_t spacing = s / budget;  // >= 1
    return offset % spacing == 0 && offset / spacing < budget ? 1 : 0;
  }

  bool exhausted(SlotIndex t) const override { return until_ && t > *until_; }

 private:
  QueuingConstraint constraint_;
  QueuingPattern pattern_;
  std::optional<SlotIndex> until_;
};

// Spends budget on the slots right after observed successes (replacing
// completed packets) and keeps at least one packet in play; every
// injection passes the sliding-window admission check.
class AdaptiveGreedyArrivals final : public ArrivalProcess {
 public:
  AdaptiveGreedyArrivals(const QueuingConstraint& c, std::optional<SlotIndex> until)
      : budget_(c), until_(until) {}

  std::uint32_t injections(const HistoryView& history, SubStream&) override {
    const SlotIndex t = history.t;
    if (until_ && t > *until_) return 0;
    const bool after_success = history.last_state == SlotState::Success;
    const bool idle = history.backlog == 0;
    if (!after_success && !idle) return 0;
    return budget_.admit(t) ? 1 : 0;
  }

  bool exhausted(SlotIndex t) const override { return until_ && t > *until_; }

 private:
  SlidingBudget budget_;
  std::optional<SlotIndex> until_;
};

class NeverJammer final : public AdaptiveJammer {
 public:
  bool jam(const HistoryView&, SubStream&) override { return false; }
};

class FirstJJammer final : public AdaptiveJammer {
 public:
  explicit FirstJJammer(std::uint64_t j) : j_(j) {}
  bool jam(const HistoryView& history, SubStream&) override { return history.t <= j_; }

 private:
  std::uint64_t j_;
};

class RandomJammer final : public AdaptiveJammer {
 public:
  explicit RandomJammer(double p) : p_(p) {}
  bool jam(const HistoryView&, SubStream& rng) override { return rng.next_double() < p_; }

 private:
  double p_;
};

// Stresses the backon phase: jams while the last observed contention sits
// below the threshold and packets remain.
class ContentionTriggeredJammer final : public AdaptiveJammer {
 public:
  explicit ContentionTriggeredJammer(double threshold) : threshold_(threshold) {}
  bool jam(const HistoryView& history, SubStream&) override {
    return history.backlog > 0 && history.last_state.has_value() &&
           history.last_contention < threshold_;
  }

 private:
  double threshold_;
};

class TargetPacketJammer final : public ReactiveJammer {
 public:
  TargetPacketJammer(PacketId target, std::uint64_t budget) : target_(target), budget_(budget) {}
  bool jam(const HistoryView&, std::span<const PacketId> send_set) override {
    if (spent_ >= budget_) return false;
    for (PacketId id : send_set) {
      if (id == target_) {
        ++spent_;
        return true;
      }
    }
    return false;
  }

 private:
  PacketId target_;
  std::uint64_t budget_;
  std::uint64_t spent_ = 0;
};

class AnySendJammer final : public ReactiveJammer {
 public:
  explicit AnySendJammer(std::uint64_t budget) : budget_(budget) {}
  bool jam(const HistoryView&, std::span<const PacketId> send_set) override {
    if (spent_ >= budget_ || send_set.empty()) return false;
    ++spent_;
    return true;
  }

 private:
  std::uint64_t budget_;
  std::uint64_t spent_ = 0;
};

}  // namespace

std::unique_ptr<ArrivalProcess> make_arrivals(const ArrivalSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ArrivalSpec::Kind::Batch:
      return std::make_unique<BatchArrivals>(spec.batch_n);
    case ArrivalSpec::Kind::Bernoulli:
      return std::make_unique<BernoulliArrivals>(spec.rate, spec.until);
    case ArrivalSpec::Kind::Queuing:
      if (spec.pattern == QueuingPattern::AdaptiveGreedy) {
        return std::make_unique<AdaptiveGreedyArrivals>(spec.constraint, spec.until);
      }
      return std::make_unique<PatternedQueuingArrivals>(spec.constraint, spec.pattern, spec.until);
  }
  throw std::logic_error("make_arrivals: unknown kind");
}

std::unique_ptr<AdaptiveJammer> make_adaptive_jammer(const AdaptiveJamSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case AdaptiveJamSpec::Kind::Never:
      return std::make_unique<NeverJammer>();
    case AdaptiveJamSpec::Kind::FirstJ:
      return std::make_unique<FirstJJammer>(spec.first_j);
    case AdaptiveJamSpec::Kind::Random:
      return std::make_unique<RandomJammer>(spec.p);
    case AdaptiveJamSpec::Kind::ContentionTriggered:
      return std::make_unique<ContentionTriggeredJammer>(spec.threshold);
  }
  throw std::logic_error("make_adaptive_jammer: unknown kind");
}

std::unique_ptr<ReactiveJammer> make_reactive_jammer(const ReactiveJamSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ReactiveJamSpec::Kind::None:
      return nullptr;
    case ReactiveJamSpec::Kind::TargetPacket:
      return std::make_unique<TargetPacketJammer>(spec.target, spec.budget);
    case ReactiveJamSpec::Kind::AnySend:
      return std::make_unique<AnySendJammer>(spec.budget);
  }
  throw std::logic_error("make_reactive_jammer: unknown kind");
}

bool arrivals_exhausted(const ArrivalSpec& spec, SlotIndex t) {
  switch (spec.kind) {
    case ArrivalSpec::Kind::Batch:
      return t > 1;
    case ArrivalSpec::Kind::Bernoulli:
    case ArrivalSpec::Kind::Queuing:
      return spec.until && t > *spec.until;
  }
  return false;
}

ScheduleValidation validate_schedule(std::span<const SlotLoad> slots,
                                     const QueuingConstraint& constraint) {
  constraint.validate();
  ScheduleValidation result;
  if (slots.empty()) return result;
  const std::uint64_t budget = constraint.budget();
  const std::size_t n = slots.size();
  const std::size_t window = std::min<std::size_t>(constraint.granularity, n);

  auto load_of = [&](std::size_t i) -> std::uint64_t {
    return slots[i].injections + (slots[i].jammed ? 1u : 0u);
  };

  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < window; ++i) sum += load_of(i);
  if (sum > budget) {
    return {false, 1, sum};
  }
  for (std::size_t start = 1; start + window <= n; ++start) {
    sum -= load_of(start - 1);
    sum += load_of(start + window - 1);
    if (sum > budget) {
      return {false, static_cast<SlotIndex>(start + 1), sum};
    }
  }
  return result;
}

}  // namespace backofflab
