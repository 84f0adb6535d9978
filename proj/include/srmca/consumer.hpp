#ifndef SRMCA_CONSUMER_HPP
#define SRMCA_CONSUMER_HPP

#include "srmca/forwarder.hpp"
#include "srmca/sync.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace srmca {

struct ConsumerConfig
{
  double fps = 25.0;
  std::uint32_t gopSize = 25;
  double theta = 1000.0;                    ///< ms
  std::uint32_t receiveBufferFrames = 100;  ///< n_R_buf
  double dejitter = 40.0;                   ///< static de-jitter delay, also D_j, ms
  double decodeDelay = 10.0;
  double encodeDelay = 20.0;
  double e2eTarget = 250.0;                 ///< delta_e2e, ms
  double rttEstimate = 80.0;                ///< delta_rtt used for scheduling, ms
  double beta = 0.5;
  double gamma = 0.5;
  std::uint32_t keyChunks = 5;
  std::uint32_t deltaChunks = 1;

  double
  frameInterval() const
  {
    return 1000.0 / fps;
  }

  std::uint32_t
  nTheta() const;

  /// \throw ContractViolation
  void
  validate() const;
};

/// epsilon_ir for frame k from the configured key/delta estimates.
std::uint32_t
estimateChunks(const ConsumerConfig& cfg, FrameIndex k);

/// tau_k = T_notify + theta + delta_e2e - (D_j + delta_dec + delta_rtt), no precondition check.
SimTime
firstPlayoutTime(SimTime tNotify, double theta, double e2e, double dj, double dec, double rtt);

/** \brief Play-out time of the first frame after a notification.
 *
 *  \throw ContractViolation unless k == anchor + theta / t_f
 */
SimTime
computePlayoutTime(FrameIndex k, FrameIndex anchor, SimTime tNotify, const ConsumerConfig& cfg);

/// tau_k = tau_{k-1} + t_f
inline SimTime
successorPlayoutTime(SimTime previous, double frameInterval)
{
  return previous + frameInterval;
}

/// Pre-fetch lead: theta + n_I_buf / rho_f, ms.
double
prefetchDelay(double theta, std::uint32_t interestBufferFrames, double fps);

/// delta_play-out >= delta_pre-fetch + delta_oneway + T_notify
inline bool
playoutDeadlineHolds(double playout, double prefetch, double oneway, double tNotify)
{
  return playout >= prefetch + oneway + tNotify;
}

enum class ConsumerActionKind : std::uint8_t {
  interest,   ///< pre-fetch Interest (frame, chunk)
  repair,     ///< Interest for a chunk beyond epsilon_ir
  cancel,     ///< drop the local pending Interest (frame, chunk)
  schedule,   ///< frame gets play-out time `time`
  complete,   ///< all chunks of frame received
  jumpLag,
  jumpFail,
  restart,
};

std::string_view
toString(ConsumerActionKind k);

struct ConsumerAction
{
  ConsumerActionKind kind;
  FrameIndex frame = 0;
  std::uint32_t chunk = 0;
  SimTime time = 0.0;

  bool operator==(const ConsumerAction&) const = default;
};

struct ConsumerCounters
{
  std::uint64_t staleNotifications = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t outOfWindow = 0;
  std::uint64_t repairs = 0;
  std::uint64_t cancels = 0;
  std::uint64_t lagJumps = 0;
  std::uint64_t failJumps = 0;
  std::uint64_t restarts = 0;
  std::uint64_t reexpressed = 0; ///< chunk Interests sent again after a window jump
};

/** \brief Consumer flow controller and content handler for one producer stream.
 *
 *  Notification handling, pre-fetching (bootstrap plus one tick per t_f) and
 *  content-object processing share r_min / r_max. A window jump from a
 *  notification takes effect on the next tick.
 */
class ConsumerStream
{
public:
  explicit
  ConsumerStream(ConsumerConfig cfg);

  std::vector<ConsumerAction>
  onNotification(const Notification& n, SimTime now);

  /// Called every t_f once started().
  std::vector<ConsumerAction>
  tick(SimTime now);

  std::vector<ConsumerAction>
  onData(const DataObject& data, SimTime now);

  bool
  started() const
  {
    return m_started;
  }

  FrameIndex
  rMin() const
  {
    return m_rMin;
  }

  FrameIndex
  rMax() const
  {
    return m_rMax;
  }

  /// Last frame the pre-fetcher expressed Interests for.
  FrameIndex
  cursor() const
  {
    return m_k;
  }

  std::optional<SimTime>
  playoutTime(FrameIndex k) const;

  /// Frames with open state (requested, not yet discarded).
  std::size_t
  openFrames() const
  {
    return m_frames.size();
  }

  const ConsumerConfig&
  config() const
  {
    return m_cfg;
  }

  const ConsumerCounters&
  counters() const
  {
    return m_counters;
  }

private:
  struct FrameState
  {
    std::uint32_t requested = 0;
    std::optional<std::uint32_t> total;
    std::set<std::uint32_t> received;
    bool complete = false;
    SimTime tau = 0.0;
  };

  void
  bootstrap(std::vector<ConsumerAction>& out);

  void
  request(FrameIndex k, SimTime tau, std::vector<ConsumerAction>& out);

  void
  discardBelow(FrameIndex k, std::vector<ConsumerAction>& out);

  void
  reexpress(std::vector<ConsumerAction>& out);

  ConsumerConfig m_cfg;
  bool m_started = false;
  FrameIndex m_rMin = 0;
  FrameIndex m_rMax = 0;
  FrameIndex m_rMinStar = 0;
  FrameIndex m_rMaxStar = 0;
  FrameIndex m_k = 0;
  SimTime m_lastTau = 0.0;
  SimTime m_tNotify = 0.0;
  std::optional<FrameIndex> m_lastAnchor;
  std::map<FrameIndex, FrameState> m_frames;
  ConsumerCounters m_counters;
};

/// Audio/video lip-sync gate for one producer.
class AvSync
{
public:
  static constexpr double MAX_AUDIO_LEAD = 45.0;
  static constexpr double MAX_AUDIO_LAG = 125.0;

  /// \return true to release the frame now, false to hold it
  bool
  offer(MediaType media, double timestamp) const;

  void
  release(MediaType media, double timestamp);

  std::optional<double>
  lastAudio() const
  {
    return m_audio;
  }

  std::optional<double>
  lastVideo() const
  {
    return m_video;
  }

private:
  std::optional<double> m_audio;
  std::optional<double> m_video;
};

} // namespace srmca

#endif // SRMCA_CONSUMER_HPP
