#include "srmca/consumer.hpp"
#include "srmca/media.hpp"

#include <cmath>

namespace srmca {

std::uint32_t
ConsumerConfig::nTheta() const
{
  return static_cast<std::uint32_t>(std::llround(theta * fps / 1000.0));
}

void
ConsumerConfig::validate() const
{
  if (fps <= 0)
    throw ContractViolation("rho_f must be > 0");
  if (gopSize < 1)
    throw ContractViolation("sigma must be >= 1");
  if (receiveBufferFrames < 1)
    throw ContractViolation("n_R_buf must be >= 1");
  if (!(beta > 0 && beta < 1) || !(gamma > 0 && gamma < 1))
    throw ContractViolation("beta and gamma must lie in (0, 1)");
  if (keyChunks < 1 || deltaChunks < 1)
    throw ContractViolation("chunk estimates must be >= 1");
}

std::uint32_t
estimateChunks(const ConsumerConfig& cfg, FrameIndex k)
{
  return expectedChunks(k, cfg.gopSize, cfg.keyChunks, cfg.deltaChunks);
}

SimTime
firstPlayoutTime(SimTime tNotify, double theta, double e2e, double dj, double dec, double rtt)
{
  return tNotify + theta + e2e - (dj + dec + rtt);
}

SimTime
computePlayoutTime(FrameIndex k, FrameIndex anchor, SimTime tNotify, const ConsumerConfig& cfg)
{
  const double ahead = cfg.theta / cfg.frameInterval();
  if (std::abs(static_cast<double>(k - anchor) - ahead) > 1e-9)
    throw ContractViolation("frame " + std::to_string(k) + " is not theta/t_f frames past anchor " +
                            std::to_string(anchor));
  return firstPlayoutTime(tNotify, cfg.theta, cfg.e2eTarget, cfg.dejitter, cfg.decodeDelay,
                          cfg.rttEstimate);
}

double
prefetchDelay(double theta, std::uint32_t interestBufferFrames, double fps)
{
  return theta + interestBufferFrames * 1000.0 / fps;
}

std::string_view
toString(ConsumerActionKind k)
{
  switch (k) {
    case ConsumerActionKind::interest: return "interest";
    case ConsumerActionKind::repair: return "repair";
    case ConsumerActionKind::cancel: return "cancel";
    case ConsumerActionKind::schedule: return "schedule";
    case ConsumerActionKind::complete: return "frame-complete";
    case ConsumerActionKind::jumpLag: return "jump-lag";
    case ConsumerActionKind::jumpFail: return "jump-fail";
    case ConsumerActionKind::restart: return "restart";
  }
  return "?";
}

ConsumerStream::ConsumerStream(ConsumerConfig cfg)
  : m_cfg(cfg)
{
  m_cfg.validate();
}

std::optional<SimTime>
ConsumerStream::playoutTime(FrameIndex k) const
{
  auto it = m_frames.find(k);
  if (it == m_frames.end())
    return std::nullopt;
  return it->second.tau;
}

void
ConsumerStream::request(FrameIndex k, SimTime tau, std::vector<ConsumerAction>& out)
{
  auto& fs = m_frames[k];
  fs.requested = estimateChunks(m_cfg, k);
  fs.tau = tau;
  m_lastTau = tau;
  out.push_back({ConsumerActionKind::schedule, k, 0, tau});
  for (std::uint32_t c = 0; c < fs.requested; ++c)
    out.push_back({ConsumerActionKind::interest, k, c, 0.0});
}

void
ConsumerStream::discardBelow(FrameIndex k, std::vector<ConsumerAction>& out)
{
  while (!m_frames.empty() && m_frames.begin()->first < k) {
    auto& [f, fs] = *m_frames.begin();
    if (!fs.complete) {
      for (std::uint32_t c = 0; c < fs.requested; ++c) {
        if (!fs.received.contains(c)) {
          out.push_back({ConsumerActionKind::cancel, f, c, 0.0});
          ++m_counters.cancels;
        }
      }
    }
    m_frames.erase(m_frames.begin());
  }
}

void
ConsumerStream::bootstrap(std::vector<ConsumerAction>& out)
{
  discardBelow(m_rMin, out);
  m_frames.clear();

  SimTime tau = firstPlayoutTime(m_tNotify, m_cfg.theta, m_cfg.e2eTarget, m_cfg.dejitter,
                                 m_cfg.decodeDelay, m_cfg.rttEstimate);
  for (FrameIndex k = m_rMin; k <= m_rMax; ++k) {
    if (k > m_rMin)
      tau = successorPlayoutTime(tau, m_cfg.frameInterval());
    request(k, tau, out);
  }
  m_k = m_rMax;
  m_rMinStar = m_rMin;
  m_rMaxStar = m_rMax;
}

std::vector<ConsumerAction>
ConsumerStream::onNotification(const Notification& n, SimTime now)
{
  std::vector<ConsumerAction> out;
  const FrameIndex anchor = n.fingerprint.anchor;
  if (m_lastAnchor && anchor < *m_lastAnchor) {
    ++m_counters.staleNotifications;
    return out;
  }
  m_lastAnchor = anchor;
  m_tNotify = now;

  const FrameIndex nTheta = m_cfg.nTheta();
  const FrameIndex nR = m_cfg.receiveBufferFrames;

  if (!m_started) {
    m_started = true;
    m_rMin = anchor + nTheta;
    m_rMax = m_rMin + nR;
    bootstrap(out);
  }
  else if (anchor > m_rMin + nR) {
    m_rMin = anchor + nTheta;
    m_rMax = m_rMin + nR;
    ++m_counters.failJumps;
    out.push_back({ConsumerActionKind::jumpFail, m_rMin, 0, now});
  }
  else if (static_cast<double>(anchor) > static_cast<double>(m_rMin) + m_cfg.gamma * nR) {
    m_rMin = anchor + static_cast<FrameIndex>(std::floor(m_cfg.beta * nTheta));
    m_rMax = m_rMin + nR;
    ++m_counters.lagJumps;
    out.push_back({ConsumerActionKind::jumpLag, m_rMin, 0, now});
  }
  return out;
}

void
ConsumerStream::reexpress(std::vector<ConsumerAction>& out)
{
  // kept Interests may predate a disruption whose Data never arrived
  for (auto it = m_frames.lower_bound(m_rMin); it != m_frames.end() && it->first <= m_rMaxStar; ++it) {
    auto& fs = it->second;
    if (fs.complete)
      continue;
    for (std::uint32_t c = 0; c < fs.requested; ++c) {
      if (fs.received.contains(c))
        continue;
      out.push_back({ConsumerActionKind::interest, it->first, c, 0.0});
      ++m_counters.reexpressed;
    }
  }
}

std::vector<ConsumerAction>
ConsumerStream::tick(SimTime /*now*/)
{
  std::vector<ConsumerAction> out;
  if (!m_started)
    return out;

  if (m_k == m_rMax) {
    if (m_rMax + 1 - m_rMin <= static_cast<FrameIndex>(m_cfg.receiveBufferFrames)) {
      ++m_k;
      m_rMax = m_k;
      request(m_k, successorPlayoutTime(m_lastTau, m_cfg.frameInterval()), out);
    }
  }
  else if (m_k < m_rMax) {
    if (m_rMinStar < m_rMin && m_rMin <= m_rMaxStar) {
      discardBelow(m_rMin, out);
      reexpress(out);
      for (FrameIndex k = m_rMaxStar + 1; k <= m_rMax; ++k)
        request(k, successorPlayoutTime(m_lastTau, m_cfg.frameInterval()), out);
      m_k = m_rMax;
    }
    else if (m_rMin > m_rMaxStar) {
      ++m_counters.restarts;
      out.push_back({ConsumerActionKind::restart, m_rMin, 0, 0.0});
      bootstrap(out);
    }
  }
  m_rMinStar = m_rMin;
  m_rMaxStar = m_rMax;
  return out;
}

std::vector<ConsumerAction>
ConsumerStream::onData(const DataObject& data, SimTime now)
{
  std::vector<ConsumerAction> out;
  const auto i = static_cast<FrameIndex>(data.name.frame);
  const auto j = data.name.chunk;

  auto it = m_frames.find(i);
  if (!m_started || i < m_rMin || i > m_rMax || it == m_frames.end()) {
    ++m_counters.outOfWindow;
    return out;
  }
  auto& fs = it->second;
  if (fs.complete || fs.received.contains(j)) {
    ++m_counters.duplicates;
    return out;
  }
  fs.received.insert(j);

  if (!fs.total) {
    const std::uint32_t total = data.meta.totalChunks;
    fs.total = total;
    if (total > fs.requested) {
      for (std::uint32_t c = fs.requested; c < total; ++c)
        out.push_back({ConsumerActionKind::repair, i, c, 0.0});
      m_counters.repairs += total - fs.requested;
      fs.requested = total;
    }
    else if (total < fs.requested) {
      for (std::uint32_t c = total; c < fs.requested; ++c) {
        if (!fs.received.contains(c)) {
          out.push_back({ConsumerActionKind::cancel, i, c, 0.0});
          ++m_counters.cancels;
        }
      }
      fs.requested = total;
    }
  }

  if (fs.received.size() >= *fs.total) {
    fs.complete = true;
    out.push_back({ConsumerActionKind::complete, i, 0, now});
    // r_min may already sit on a complete frame when it was clamped to r_max
    auto atMin = m_frames.find(m_rMin);
    if (i == m_rMin || (atMin != m_frames.end() && atMin->second.complete)) {
      FrameIndex next = m_rMin;
      while (next < m_rMax) {
        auto f = m_frames.find(next);
        if (f == m_frames.end() || !f->second.complete)
          break;
        ++next;
      }
      m_rMin = next;
      // completed frames below the window are no longer needed
      for (auto e = m_frames.begin(); e != m_frames.end() && e->first < m_rMin;)
        e = m_frames.erase(e);
    }
  }
  return out;
}

bool
AvSync::offer(MediaType media, double timestamp) const
{
  if (media == MediaType::audio)
    return !m_video || timestamp - *m_video <= MAX_AUDIO_LEAD;
  if (media == MediaType::video)
    return !m_audio || *m_audio - timestamp >= -MAX_AUDIO_LAG;
  return true;
}

void
AvSync::release(MediaType media, double timestamp)
{
  if (media == MediaType::audio)
    m_audio = timestamp;
  else if (media == MediaType::video)
    m_video = timestamp;
}

} // namespace srmca
