#ifndef SRMCA_SIMULATOR_HPP
#define SRMCA_SIMULATOR_HPP

#include "srmca/config.hpp"
#include "srmca/trace.hpp"

#include <functional>
#include <optional>
#include <queue>

namespace srmca {

/// Time-ordered events; ties break by insertion order.
class EventQueue
{
public:
  using Handler = std::function<void()>;

  void
  schedule(SimTime at, Handler fn);

  /// Runs events with time <= until. \return number of events run
  std::uint64_t
  runUntil(SimTime until);

  SimTime
  now() const
  {
    return m_now;
  }

  bool
  empty() const
  {
    return m_queue.empty();
  }

  std::size_t
  size() const
  {
    return m_queue.size();
  }

private:
  struct Entry
  {
    SimTime time;
    std::uint64_t seq;
    Handler fn;
  };

  struct Later
  {
    bool
    operator()(const Entry& a, const Entry& b) const
    {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> m_queue;
  std::uint64_t m_seq = 0;
  SimTime m_now = 0.0;
};

/// One direction of a point-to-point link.
struct Link
{
  double latency = 0.0;    ///< ms
  double bandwidth = 1e9;  ///< bits/s
  bool up = true;
  std::uint64_t epoch = 0; ///< bumped on every failure
  SimTime nextFree = 0.0;

  /// Arrival time of a packet handed to the link at `now`, or nullopt when
  /// the link is down. FIFO: a packet waits for the previous one to finish.
  std::optional<SimTime>
  transmit(std::uint64_t bytes, SimTime now);
};

struct RunResult
{
  ScenarioConfig config;
  std::unique_ptr<Trace> trace;
  std::map<std::pair<std::string, std::string>, double> linkLatency; ///< (from, to) -> ms
  std::map<std::string, ProducerCounters> producers;  ///< "ue:media"
  std::map<std::string, ConsumerCounters> consumers;  ///< "consumer>ue:media"
  std::map<std::string, ForwarderCounters> forwarders;
  std::uint64_t events = 0;

  /// Sum of link latencies on the path a -> b (UE or VSER ids).
  double
  pathLatency(const std::string& from, const std::string& to) const;
};

/** \brief Runs a validated scenario to completion.
 *
 *  \param csvDir when non-empty, per-record-type CSV files are written there
 *  \throw ConfigError if the scenario does not validate
 */
RunResult
runScenario(const ScenarioConfig& cfg, const std::string& csvDir = "");

} // namespace srmca

#endif // SRMCA_SIMULATOR_HPP
