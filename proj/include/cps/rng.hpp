#ifndef CPS_RNG_HPP
#define CPS_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cps {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block is a
// pure function of (key, counter), which is what makes per-(site, kind)
// streams regenerable and mutually independent without shared state.
namespace philox {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round != 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = std::uint64_t(kM0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kM1) * ctr[2];
    ctr = Counter{std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
                  std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
  }
  return ctr;
}

}  // namespace philox

// Uniform double in the open interval (0,1) from 64 random bits.
inline double uniform01(std::uint64_t bits) {
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

// The five clock kinds of the graphical construction, in deterministic
// tie-break order, plus the initial-condition draw used by the Bernoulli
// window sampler. Rates: Death 1, Infect* lambda1, Extra* lambda2-lambda1.
enum class ClockKind : std::uint8_t {
  Death = 0,
  InfectRight = 1,
  InfectLeft = 2,
  ExtraInfectRight = 3,
  ExtraInfectLeft = 4,
  InitDraw = 5,
};

constexpr int kNumClockKinds = 5;

// Identity of one random substream. Distinct identities index disjoint
// counter blocks of the same Philox key, hence independent streams.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
  std::int64_t site = 0;
  ClockKind kind = ClockKind::Death;
  std::uint8_t lane = 0;  // 0 default; estimators use lanes for side streams
};

namespace detail {

inline std::uint32_t zigzag32(std::int64_t site) {
  // Engine coordinates stay far below 2^31 at any reachable scale; assert
  // instead of wrapping.
  if (site > 0x3FFFFFFFLL || site < -0x3FFFFFFFLL)
    throw std::overflow_error("lattice coordinate out of addressable range");
  return site >= 0 ? std::uint32_t(site) << 1 : (std::uint32_t(-site) << 1) - 1u;
}

inline philox::Key key_of(const StreamId& id) {
  return philox::Key{std::uint32_t(id.seed), std::uint32_t(id.seed >> 32)};
}

inline philox::Counter counter_of(const StreamId& id, std::uint32_t block_index) {
  return philox::Counter{block_index, zigzag32(id.site), id.replica,
                         std::uint32_t(std::uint8_t(id.kind)) |
                             (std::uint32_t(id.lane) << 8)};
}

}  // namespace detail

// One uniform (0,1) variate addressed by stream identity and index.
inline double uniform_at(const StreamId& id, std::uint32_t index) {
  const auto blk = philox::block(detail::counter_of(id, index), detail::key_of(id));
  return uniform01((std::uint64_t(blk[0]) << 32) | blk[1]);
}

// Lazily generated, memoized Poisson event times for one (site, kind)
// substream on [0, horizon]. Times are strictly increasing and a
// deterministic function of the stream identity: a regenerated stream
// reproduces them bit for bit.
class ClockStream {
 public:
  ClockStream() = default;

  void reset(const StreamId& id, double rate, double horizon) {
    id_ = id;
    rate_ = rate;
    horizon_ = horizon;
    times_.clear();
    last_ = 0.0;
    blocks_ = 0;
    half_ = 0;
    cursor_ = 0;
    exhausted_ = !(rate > 0.0);
  }

  // Smallest event time strictly greater than `after`, advancing the cursor
  // past everything <= after; +inf once the stream is spent on [0, horizon].
  double next_after(double after) {
    while (true) {
      if (cursor_ < times_.size()) {
        if (times_[cursor_] > after) return times_[cursor_];
        ++cursor_;
        continue;
      }
      if (exhausted_ || !generate_one())
        return std::numeric_limits<double>::infinity();
    }
  }

  // Consumes the event the cursor points at (the one last returned).
  void consume() { ++cursor_; }

  double rate() const { return rate_; }
  const std::vector<double>& times() const { return times_; }

  // Materializes every event in [0, horizon]; used by tests.
  const std::vector<double>& materialize_all() {
    while (!exhausted_ && generate_one()) {
    }
    return times_;
  }

 private:
  bool generate_one() {
    const double u = next_uniform();
    double next = last_ + (-std::log(u)) / rate_;
    if (next <= last_)  // sub-ulp increment; keep strict monotonicity
      next = std::nextafter(last_, std::numeric_limits<double>::infinity());
    if (next > horizon_) {
      exhausted_ = true;
      return false;
    }
    last_ = next;
    times_.push_back(next);
    return true;
  }

  double next_uniform() {
    if (half_ == 0) {
      const auto blk =
          philox::block(detail::counter_of(id_, blocks_), detail::key_of(id_));
      std::uint64_t w0 = (std::uint64_t(blk[0]) << 32) | blk[1];
      spare_ = (std::uint64_t(blk[2]) << 32) | blk[3];
      ++blocks_;
      half_ = 1;
      return uniform01(w0);
    }
    half_ = 0;
    return uniform01(spare_);
  }

  StreamId id_{};
  double rate_ = 0.0;
  double horizon_ = 0.0;
  std::vector<double> times_;
  double last_ = 0.0;
  std::uint64_t spare_ = 0;
  std::uint32_t blocks_ = 0;
  std::uint32_t cursor_ = 0;
  std::uint8_t half_ = 0;
  bool exhausted_ = true;
};

}  // namespace cps

#endif  // CPS_RNG_HPP
