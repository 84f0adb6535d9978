#ifndef SRMCA_METRICS_HPP
#define SRMCA_METRICS_HPP

#include "srmca/simulator.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>

namespace srmca {

class InvalidInputError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class NotApplicableError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

struct BandwidthModelInputs
{
  std::uint32_t nVser = 1;
  std::uint32_t kappaI = 1; ///< clients at the VSER
  std::uint32_t kappaU = 1; ///< clients in the session
  double wI = 0.0;          ///< Interest stream rate toward one client, bits/s
  double wD = 0.0;          ///< per-client data rate, bits/s
};

/// Incoming traffic at a VSER. \throw InvalidInputError
double
predictBandwidthDl(const BandwidthModelInputs& in);

/// Outgoing traffic at a VSER. \throw InvalidInputError
double
predictBandwidthUl(const BandwidthModelInputs& in);

struct LatencyBudget
{
  double rtt = 80.0;
  double dejitter = 40.0;
  double enc = 20.0;
  double dec = 10.0;
  double e2e = 250.0;

  double
  codec() const
  {
    return enc + dec;
  }

  static LatencyBudget
  forMedia(const ScenarioConfig& cfg, MediaType media);
};

/// rtt * (1/2 + [sgn(eps_i - eps_ir)]+), i.e. the transfer term of the latency bound
double
transferBound(double rtt, bool underFetched);

struct LatencyDecomposition
{
  double transfer = 0.0;   ///< measured producer -> consumer time
  double dejitter = 0.0;
  double codec = 0.0;
  double total = 0.0;      ///< measured one-way latency
  double bound = 0.0;      ///< model bound from the budget
  bool pass = false;       ///< bound <= e2e target
};

/// \throw NotApplicableError if the frame never completed
LatencyDecomposition
oneWayLatencyCheck(const FrameRecord& frame, const LatencyBudget& budget, std::uint32_t estimatedChunks);

/// Model-only variant used for the worked examples.
LatencyDecomposition
oneWayLatencyBound(const LatencyBudget& budget, bool underFetched);

struct DeadlineCheck
{
  double playout = 0.0;  ///< tau_k
  double prefetch = 0.0; ///< pre-fetch duration bound
  double lead = 0.0;     ///< (k - anchor) * t_f, capped by prefetch
  double oneway = 0.0;
  double tNotify = 0.0;
  bool pass = false;
};

/** \brief Play-out deadline of one frame against the notification of its anchor.
 *
 *  The pre-fetch term is the lead the frame actually has over its anchor key
 *  frame, which can never exceed theta + n_I_buf / rho_f.
 */
DeadlineCheck
playoutDeadlineCheck(const FrameRecord& frame, FrameIndex anchor, SimTime tNotify, const ConsumerConfig& cc,
                     std::uint32_t interestBufferFrames, double rtt);

struct StreamQuality
{
  std::string consumer;
  ProducerKey producer;
  std::uint64_t total = 0;
  std::uint64_t usable = 0;
  std::uint64_t late = 0;
  std::uint64_t lost = 0;
  std::uint64_t withinBudget = 0;    ///< complete and one-way latency <= e2e target
  std::uint64_t deadlineMisses = 0;  ///< frames failing the play-out deadline check
  std::vector<std::pair<FrameIndex, double>> latencies; ///< (frame, one-way ms) of completed frames
  std::set<FrameIndex> usableFrames;

  double
  qualityPct() const
  {
    return total == 0 ? 100.0 : 100.0 * static_cast<double>(usable) / static_cast<double>(total);
  }

  double
  withinBudgetPct() const
  {
    return total == 0 ? 100.0 : 100.0 * static_cast<double>(withinBudget) / static_cast<double>(total);
  }

  /// Latency percentile (0..100); NaN when nothing completed.
  double
  percentile(double p) const;
};

/** \brief Usable / late / lost classification of every frame a consumer was
 *  responsible for: from its first scheduled frame up to the last published
 *  frame whose decoding deadline falls inside the run. Frames skipped by a
 *  window jump count as lost.
 */
StreamQuality
computeQuality(const RunResult& run, const std::string& consumer, const ProducerKey& producer);

std::vector<StreamQuality>
computeQuality(const RunResult& run);

/// Notification bytes over all delivered bytes.
double
notificationOverhead(const Trace& trace);

struct Window
{
  SimTime from = 0.0;
  SimTime to = 0.0;

  double
  seconds() const
  {
    return (to - from) / 1000.0;
  }
};

/// GOP-aligned window after warm-up (last join + pre-fetch) ending >= 1 s before the end.
Window
steadyStateWindow(const ScenarioConfig& cfg);

struct VserBandwidth
{
  std::string vser;
  std::uint32_t clients = 0;
  double dlMeasured = 0.0; ///< bits/s
  double dlPredicted = 0.0;
  double ulMeasured = 0.0;
  double ulPredicted = 0.0;

  /// (measured - predicted) / measured
  double
  dlError() const
  {
    return dlMeasured == 0 ? 0.0 : (dlMeasured - dlPredicted) / dlMeasured;
  }

  double
  ulError() const
  {
    return ulMeasured == 0 ? 0.0 : (ulMeasured - ulPredicted) / ulMeasured;
  }
};

struct BandwidthReport
{
  Window window;
  double wI = 0.0;
  double wD = 0.0;
  std::uint32_t kappaU = 0;
  std::vector<VserBandwidth> vsers;
};

/// Measured vs. predicted per-VSER rates, Interests and Data only, w rates taken from UE uplinks.
BandwidthReport
bandwidthReport(const RunResult& run);

struct RepairSample
{
  std::string consumer;
  ProducerKey producer;
  FrameIndex frame = 0;
  SimTime firstChunk = 0.0;
  SimTime complete = 0.0;
  double allowance = 0.0; ///< one path RTT plus serialization of the frame
  bool pass = false;
};

/// Every completed frame that needed more chunks than the consumer estimated.
std::vector<RepairSample>
underFetchRepairs(const RunResult& run);

/// tau of the first usable frame completing at or after `after`.
std::optional<SimTime>
resumeTime(const RunResult& run, const std::string& consumer, const ProducerKey& producer, SimTime after);

struct FirstPlayout
{
  std::string consumer;
  ProducerKey producer;
  SimTime firstNotification = 0.0;
  std::optional<SimTime> firstPlayout;
  bool pass = false; ///< first play-out within theta + e2e of the first notification
};

std::vector<FirstPlayout>
firstPlayouts(const RunResult& run);

nlohmann::json
summaryJson(const RunResult& run);

/// consumer,producer,frame,latency_ms
void
writeLatencyCsv(std::ostream& os, const std::vector<StreamQuality>& streams);

} // namespace srmca

#endif // SRMCA_METRICS_HPP
