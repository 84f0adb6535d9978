#include "srmca/producer.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace srmca {

std::uint32_t
ProducerConfig::nTheta() const
{
  return static_cast<std::uint32_t>(std::llround(theta * fps / 1000.0));
}

void
ProducerConfig::validate() const
{
  if (fps <= 0)
    throw ContractViolation("rho_f must be > 0");
  if (gopSize < 1)
    throw ContractViolation("sigma must be >= 1");
  if (kNotify < 1)
    throw ContractViolation("k_notify must be >= 1");
  if (chunkSize < 1)
    throw ContractViolation("l_chunk must be >= 1");
  if (!(omega > 0 && omega < 1))
    throw ContractViolation("omega must lie in (0, 1)");
  if (!(xi > 1))
    throw ContractViolation("xi must be > 1");
  if (std::abs(theta * fps / 1000.0 - nTheta()) > 1e-9)
    throw ContractViolation("theta * rho_f must be a whole number of frames");
}

std::string_view
toString(ProducerActionKind k)
{
  switch (k) {
    case ProducerActionKind::publish: return "publish";
    case ProducerActionKind::notify: return "notify";
    case ProducerActionKind::sendData: return "satisfy";
    case ProducerActionKind::pend: return "pend";
    case ProducerActionKind::dropUnfair: return "drop-unfair";
    case ProducerActionKind::dropStale: return "drop-stale";
    case ProducerActionKind::dropNoChunk: return "drop-no-chunk";
    case ProducerActionKind::adaptNotify: return "adapt-notify";
    case ProducerActionKind::evict: return "evict";
  }
  return "?";
}

Producer::Producer(ProducerConfig cfg, ContentName base)
  : m_cfg(cfg)
  , m_base(std::move(base))
{
  m_cfg.validate();
  m_base.frame = 0;
  m_base.chunk = 0;
}

Notification
Producer::issueNotification(FrameIndex keyFrame, SimTime now)
{
  if (keyFrame < 0 || keyFrame % m_cfg.gopSize != 0)
    throw ContractViolation("notification anchor " + std::to_string(keyFrame) + " is not a key frame");
  Notification n;
  n.index = ++m_notificationIndex;
  n.fingerprint = {m_base.conf, m_base.ue, m_base.media, keyFrame};
  n.issueTime = now;
  ++m_counters.notifications;
  return n;
}

void
Producer::forward(StoredFrame& sf, FrameIndex frame, std::uint32_t chunk, FaceId face,
                  std::vector<ProducerAction>& out)
{
  const auto& d = sf.chunks[chunk];
  ProducerAction a{ProducerActionKind::sendData, face, frame, chunk, d->payloadSize};
  a.data = d;
  out.push_back(std::move(a));
  ++m_counters.satisfied;

  sf.forwarded.insert(chunk);
  if (sf.forwarded.size() < sf.chunks.size())
    m_partial.insert(frame);
  else
    m_partial.erase(frame);
}

std::vector<ProducerAction>
Producer::publish(const EncodedFrame& frame, SimTime now)
{
  const FrameIndex expected = m_published ? m_bMax + 1 : 0;
  if (frame.index != expected)
    throw SequenceError("frame " + std::to_string(frame.index) + " published, expected " +
                        std::to_string(expected));

  auto objects = chunkFrame(frame, m_cfg.chunkSize, m_base, now);
  std::vector<ProducerAction> out;

  StoredFrame& sf = m_content[frame.index];
  for (auto& o : objects)
    sf.chunks.push_back(std::make_shared<const DataObject>(std::move(o)));
  m_bMax = frame.index;
  m_published = true;
  ++m_counters.published;
  out.push_back({ProducerActionKind::publish, INVALID_FACE, frame.index,
                 static_cast<std::uint32_t>(sf.chunks.size()), frame.size});

  // (i * t_f) mod tau_notify == 0, in whole frames
  if (frame.index % (static_cast<FrameIndex>(m_cfg.kNotify) * m_cfg.gopSize) == 0) {
    ProducerAction a{ProducerActionKind::notify, INVALID_FACE, frame.index};
    a.notification = issueNotification(frame.index, now);
    out.push_back(std::move(a));
  }

  if (auto p = m_pending.find(frame.index); p != m_pending.end()) {
    for (const auto& [chunk, faces] : p->second) {
      if (chunk >= sf.chunks.size()) {
        m_counters.droppedNoChunk += faces.size();
        out.push_back({ProducerActionKind::dropNoChunk, INVALID_FACE, frame.index, chunk});
        continue;
      }
      for (FaceId f : faces)
        forward(sf, frame.index, chunk, f, out);
    }
    m_pending.erase(p);
  }

  updateWindows(out);
  return out;
}

bool
Producer::fills(FrameIndex frame) const
{
  auto p = m_pending.find(frame);
  if (p == m_pending.end())
    return false;
  const auto want = expectedChunks(frame, m_cfg.gopSize, m_cfg.keyChunks, m_cfg.deltaChunks);
  for (std::uint32_t c = 0; c < want; ++c)
    if (!p->second.contains(c))
      return false;
  return true;
}

std::vector<ProducerAction>
Producer::processInterest(const Interest& interest, FaceId face, SimTime /*now*/)
{
  std::vector<ProducerAction> out;
  const auto frame = static_cast<FrameIndex>(interest.name.frame);
  const auto chunk = interest.name.chunk;

  if (m_published && frame < m_bMin) {
    ++m_counters.droppedStale;
    out.push_back({ProducerActionKind::dropStale, face, frame, chunk});
    return out;
  }

  const double nTheta = m_cfg.nTheta();

  if (m_published && frame <= m_bMax) {
    auto& sf = m_content.at(frame);
    if (chunk >= sf.chunks.size()) {
      ++m_counters.droppedNoChunk;
      out.push_back({ProducerActionKind::dropNoChunk, face, frame, chunk});
    }
    else {
      forward(sf, frame, chunk, face, out);
      updateWindows(out);
    }
  }
  else {
    const FrameIndex previousPMax = m_pMax;
    auto& faces = m_pending[frame][chunk];
    const bool added = std::find(faces.begin(), faces.end(), face) == faces.end();
    if (added)
      faces.push_back(face);
    if (fills(frame) && frame > m_pMax)
      m_pMax = frame;

    if (static_cast<double>(std::max(m_pMax, frame) - m_bMax) > m_cfg.xi * nTheta) {
      if (added) {
        std::erase(faces, face);
        if (faces.empty())
          m_pending[frame].erase(chunk);
        if (m_pending[frame].empty())
          m_pending.erase(frame);
      }
      m_pMax = previousPMax;
      ++m_counters.droppedUnfair;
      out.push_back({ProducerActionKind::dropUnfair, face, frame, chunk});
      return out;
    }
    out.push_back({ProducerActionKind::pend, face, frame, chunk});
    updateWindows(out);
  }

  if (static_cast<double>(m_pMax - m_bMax) < m_cfg.omega * nTheta && m_cfg.kNotify > 1) {
    --m_cfg.kNotify;
    ++m_counters.adaptations;
    out.push_back({ProducerActionKind::adaptNotify, INVALID_FACE, frame, m_cfg.kNotify});
  }
  return out;
}

void
Producer::updateWindows(std::vector<ProducerAction>& out)
{
  std::optional<FrameIndex> minOpen;
  if (!m_pending.empty())
    minOpen = m_pending.begin()->first;
  if (!m_partial.empty())
    minOpen = minOpen ? std::min(*minOpen, *m_partial.begin()) : *m_partial.begin();
  m_pMin = minOpen ? std::min(*minOpen, m_pMax) : m_pMax;

  if (!m_published)
    return;
  const FrameIndex gopFloor = m_bMax - static_cast<FrameIndex>(m_cfg.gopSize) + 1;
  const FrameIndex capFloor = m_bMax - static_cast<FrameIndex>(m_cfg.interestBufferFrames) + 1;
  FrameIndex bMin = std::max({m_bMin, std::min(m_pMin, gopFloor), capFloor});
  bMin = std::min(bMin, m_bMax);

  while (!m_content.empty() && m_content.begin()->first < bMin) {
    const FrameIndex f = m_content.begin()->first;
    out.push_back({ProducerActionKind::evict, INVALID_FACE, f});
    m_partial.erase(f);
    m_content.erase(m_content.begin());
  }
  m_bMin = bMin;
}

std::vector<FrameIndex>
Producer::storedFrames() const
{
  std::vector<FrameIndex> out;
  for (const auto& [f, sf] : m_content)
    out.push_back(f);
  return out;
}

std::map<FrameIndex, std::size_t>
Producer::pendingFrames() const
{
  std::map<FrameIndex, std::size_t> out;
  for (const auto& [f, chunks] : m_pending)
    out[f] = chunks.size();
  return out;
}

} // namespace srmca
