#ifndef SRMCA_TRACE_HPP
#define SRMCA_TRACE_HPP

#include "srmca/sync.hpp"

#include <array>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

namespace srmca {

enum class PacketKind : std::uint8_t { interest, data, notification };

inline constexpr std::size_t PACKET_KINDS = 3;

std::string_view
toString(PacketKind k);

/// Streaming 64-bit FNV-1a.
class Fnv1a
{
public:
  void
  update(std::string_view bytes);

  std::uint64_t
  value() const
  {
    return m_h;
  }

  std::string
  hex() const;

private:
  std::uint64_t m_h = 0xcbf29ce484222325ULL;
};

/// Bytes per packet kind in fixed-width time bins.
struct ByteBins
{
  std::map<std::int64_t, std::array<std::uint64_t, PACKET_KINDS>> bins;

  void
  add(SimTime t, PacketKind kind, std::uint64_t bytes, double binMs);

  /// Sum over bins whose start lies in [from, to).
  std::uint64_t
  sum(SimTime from, SimTime to, PacketKind kind, double binMs) const;
};

struct NodeBytes
{
  ByteBins in;  ///< by arrival time
  ByteBins out; ///< by send time
};

/// Life of one frame at one consumer, filled from consumer actions and arrivals.
struct FrameRecord
{
  std::string consumer;
  ProducerKey producer;
  FrameIndex frame = 0;
  SimTime requested = 0.0;      ///< first Interest expressed
  SimTime tau = 0.0;            ///< scheduled play-out time
  std::uint32_t requestedChunks = 0;
  std::uint32_t totalChunks = 0; ///< 0 until metadata seen
  SimTime generated = -1.0;
  SimTime firstChunk = -1.0;
  SimTime complete = -1.0;
  bool discarded = false;        ///< dropped from the window before completing
};

struct NotificationDelivery
{
  SimTime time = 0.0;
  std::string consumer;
  ProducerKey producer;
  FrameIndex anchor = 0;
};

struct ScenarioMark
{
  SimTime time = 0.0;
  std::string kind;
  std::string ue;
};

/** \brief Record stream of one run.
 *
 *  Every record is rendered as a canonical CSV line and folded into the digest
 *  in emission order. With a CSV directory set, lines also go to one file per
 *  record type. Metric inputs are kept in memory.
 */
class Trace
{
public:
  static constexpr double BIN_MS = 10.0;

  explicit
  Trace(std::string csvDir = "");

  ~Trace();

  void
  packet(SimTime sent, SimTime arrived, const std::string& from, const std::string& to,
         PacketKind kind, std::uint64_t bytes, bool dropped, std::string_view name);

  void
  producerEvent(SimTime t, const std::string& producer, std::string_view event, FrameIndex frame,
                std::uint32_t chunk, std::uint64_t bytes);

  void
  consumerEvent(SimTime t, const std::string& consumer, const std::string& producer,
                std::string_view event, FrameIndex frame, double value);

  void
  syncEvent(SimTime t, const std::string& node, std::string_view event, const Notification& n);

  void
  scenarioEvent(SimTime t, std::string_view kind, const std::string& ue);

  FrameRecord&
  frame(const std::string& consumer, const ProducerKey& producer, FrameIndex k);

  FrameRecord*
  findFrame(const std::string& consumer, const ProducerKey& producer, FrameIndex k);

  void
  notificationDelivered(const NotificationDelivery& d);

  void
  lastPublished(const ProducerKey& producer, FrameIndex k, SimTime t);

  /// Folds frame records into the digest and closes the CSV files.
  void
  finish();

  std::uint64_t
  digest() const
  {
    return m_digest.value();
  }

  std::string
  digestHex() const
  {
    return m_digest.hex();
  }

  const std::map<std::string, NodeBytes>&
  nodeBytes() const
  {
    return m_nodes;
  }

  const std::array<std::uint64_t, PACKET_KINDS>&
  totalBytes() const
  {
    return m_total;
  }

  std::uint64_t
  droppedPackets() const
  {
    return m_dropped;
  }

  const std::map<std::tuple<std::string, ProducerKey, FrameIndex>, FrameRecord>&
  frames() const
  {
    return m_frames;
  }

  const std::vector<NotificationDelivery>&
  notifications() const
  {
    return m_notifications;
  }

  const std::vector<ScenarioMark>&
  marks() const
  {
    return m_marks;
  }

  /// producer stream -> (last published frame, its publish time)
  const std::map<ProducerKey, std::pair<FrameIndex, SimTime>>&
  published() const
  {
    return m_published;
  }

  std::uint64_t
  records() const
  {
    return m_records;
  }

private:
  enum Stream : std::size_t { PACKETS, PRODUCER, CONSUMER, SYNC, SCENARIO, FRAMES, STREAM_COUNT };

  void
  emit(Stream s, const std::string& line);

  std::string m_csvDir;
  std::array<std::unique_ptr<std::ofstream>, STREAM_COUNT> m_files;
  Fnv1a m_digest;
  std::uint64_t m_records = 0;
  std::map<std::string, NodeBytes> m_nodes;
  std::array<std::uint64_t, PACKET_KINDS> m_total{};
  std::uint64_t m_dropped = 0;
  std::map<std::tuple<std::string, ProducerKey, FrameIndex>, FrameRecord> m_frames;
  std::vector<NotificationDelivery> m_notifications;
  std::vector<ScenarioMark> m_marks;
  std::map<ProducerKey, std::pair<FrameIndex, SimTime>> m_published;
  bool m_finished = false;
};

std::string
producerLabel(const ProducerKey& p);

} // namespace srmca

#endif // SRMCA_TRACE_HPP
