#include "srmca/trace.hpp"

#include <fmt/format.h>

#include <cmath>

namespace srmca {

std::string_view
toString(PacketKind k)
{
  switch (k) {
    case PacketKind::interest: return "interest";
    case PacketKind::data: return "data";
    case PacketKind::notification: return "notification";
  }
  return "?";
}

void
Fnv1a::update(std::string_view bytes)
{
  for (unsigned char c : bytes) {
    m_h ^= c;
    m_h *= 0x100000001b3ULL;
  }
}

std::string
Fnv1a::hex() const
{
  return fmt::format("{:016x}", m_h);
}

void
ByteBins::add(SimTime t, PacketKind kind, std::uint64_t bytes, double binMs)
{
  bins[static_cast<std::int64_t>(std::floor(t / binMs))][static_cast<std::size_t>(kind)] += bytes;
}

std::uint64_t
ByteBins::sum(SimTime from, SimTime to, PacketKind kind, double binMs) const
{
  std::uint64_t total = 0;
  auto lo = static_cast<std::int64_t>(std::ceil(from / binMs - 1e-9));
  for (auto it = bins.lower_bound(lo); it != bins.end() && it->first * binMs < to - 1e-9; ++it)
    total += it->second[static_cast<std::size_t>(kind)];
  return total;
}

std::string
producerLabel(const ProducerKey& p)
{
  return p.ue + ":" + std::string(toString(p.media));
}

Trace::Trace(std::string csvDir)
  : m_csvDir(std::move(csvDir))
{
  if (m_csvDir.empty())
    return;
  static const std::array<std::pair<const char*, const char*>, STREAM_COUNT> files{{
    {"packets.csv", "sent_ms,arrived_ms,from,to,kind,bytes,dropped,name"},
    {"producer.csv", "time_ms,producer,event,frame,chunk,bytes"},
    {"consumer.csv", "time_ms,consumer,producer,event,frame,value"},
    {"sync.csv", "time_ms,node,event,producer,anchor,index"},
    {"scenario.csv", "time_ms,event,ue"},
    {"frames.csv", "consumer,producer,frame,requested_ms,tau_ms,requested_chunks,total_chunks,generated_ms,first_chunk_ms,complete_ms,discarded"},
  }};
  for (std::size_t i = 0; i < STREAM_COUNT; ++i) {
    m_files[i] = std::make_unique<std::ofstream>(m_csvDir + "/" + files[i].first);
    if (!*m_files[i])
      throw std::runtime_error("cannot write trace file in '" + m_csvDir + "'");
    *m_files[i] << files[i].second << '\n';
  }
}

Trace::~Trace() = default;

void
Trace::emit(Stream s, const std::string& line)
{
  m_digest.update(line);
  m_digest.update("\n");
  ++m_records;
  if (m_files[s])
    *m_files[s] << line << '\n';
}

void
Trace::packet(SimTime sent, SimTime arrived, const std::string& from, const std::string& to,
              PacketKind kind, std::uint64_t bytes, bool dropped, std::string_view name)
{
  emit(PACKETS, fmt::format("{:.6f},{:.6f},{},{},{},{},{},{}", sent, arrived, from, to, toString(kind),
                            bytes, dropped ? 1 : 0, name));
  m_nodes[from].out.add(sent, kind, bytes, BIN_MS);
  if (dropped) {
    ++m_dropped;
    return;
  }
  m_nodes[to].in.add(arrived, kind, bytes, BIN_MS);
  m_total[static_cast<std::size_t>(kind)] += bytes;
}

void
Trace::producerEvent(SimTime t, const std::string& producer, std::string_view event, FrameIndex frame,
                     std::uint32_t chunk, std::uint64_t bytes)
{
  emit(PRODUCER, fmt::format("{:.6f},{},{},{},{},{}", t, producer, event, frame, chunk, bytes));
}

void
Trace::consumerEvent(SimTime t, const std::string& consumer, const std::string& producer,
                     std::string_view event, FrameIndex frame, double value)
{
  emit(CONSUMER, fmt::format("{:.6f},{},{},{},{},{:.6f}", t, consumer, producer, event, frame, value));
}

void
Trace::syncEvent(SimTime t, const std::string& node, std::string_view event, const Notification& n)
{
  emit(SYNC, fmt::format("{:.6f},{},{},{},{},{}", t, node, event,
                         producerLabel({n.fingerprint.ue, n.fingerprint.media}), n.fingerprint.anchor,
                         n.index));
}

void
Trace::scenarioEvent(SimTime t, std::string_view kind, const std::string& ue)
{
  emit(SCENARIO, fmt::format("{:.6f},{},{}", t, kind, ue));
  m_marks.push_back({t, std::string(kind), ue});
}

FrameRecord&
Trace::frame(const std::string& consumer, const ProducerKey& producer, FrameIndex k)
{
  auto [it, inserted] = m_frames.try_emplace({consumer, producer, k});
  if (inserted) {
    it->second.consumer = consumer;
    it->second.producer = producer;
    it->second.frame = k;
  }
  return it->second;
}

FrameRecord*
Trace::findFrame(const std::string& consumer, const ProducerKey& producer, FrameIndex k)
{
  auto it = m_frames.find({consumer, producer, k});
  return it == m_frames.end() ? nullptr : &it->second;
}

void
Trace::notificationDelivered(const NotificationDelivery& d)
{
  m_notifications.push_back(d);
}

void
Trace::lastPublished(const ProducerKey& producer, FrameIndex k, SimTime t)
{
  m_published[producer] = {k, t};
}

void
Trace::finish()
{
  if (m_finished)
    return;
  m_finished = true;
  for (const auto& [key, r] : m_frames) {
    emit(FRAMES, fmt::format("{},{},{},{:.6f},{:.6f},{},{},{:.6f},{:.6f},{:.6f},{}", r.consumer,
                             producerLabel(r.producer), r.frame, r.requested, r.tau, r.requestedChunks,
                             r.totalChunks, r.generated, r.firstChunk, r.complete, r.discarded ? 1 : 0));
  }
  for (auto& f : m_files)
    if (f)
      f->flush();
}

} // namespace srmca
