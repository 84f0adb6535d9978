#ifndef SRMCA_PRODUCER_HPP
#define SRMCA_PRODUCER_HPP

#include "srmca/media.hpp"
#include "srmca/sync.hpp"

#include <map>
#include <set>
#include <vector>

namespace srmca {

class SequenceError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct ProducerConfig
{
  double fps = 25.0;               ///< rho_f
  std::uint32_t gopSize = 25;      ///< sigma
  std::uint32_t kNotify = 1;       ///< GOPs between notifications
  std::uint32_t chunkSize = 3000;  ///< l_chunk, bytes
  std::uint32_t interestBufferFrames = 100; ///< n_I_buf
  double theta = 1000.0;           ///< fetch-ahead, ms
  double omega = 0.5;
  double xi = 6.0;
  std::uint32_t keyChunks = 5;     ///< epsilon_ir estimate for key frames
  std::uint32_t deltaChunks = 1;

  /// t_f, ms
  double
  frameInterval() const
  {
    return 1000.0 / fps;
  }

  /// n_theta = theta * rho_f, frames
  std::uint32_t
  nTheta() const;

  /// tau_notify = k_notify * sigma * t_f, ms
  double
  notifyInterval() const
  {
    return kNotify * gopSize * frameInterval();
  }

  /// \throw ContractViolation listing the first violated constraint
  void
  validate() const;
};

enum class ProducerActionKind : std::uint8_t {
  publish,      ///< frame entered the content buffer
  notify,
  sendData,     ///< satisfy: chunk forwarded toward a requester
  pend,         ///< Interest stored in the interest buffer
  dropUnfair,
  dropStale,    ///< frame already evicted below b_min
  dropNoChunk,  ///< chunk index beyond the frame's epsilon_i
  adaptNotify,
  evict,
};

std::string_view
toString(ProducerActionKind k);

struct ProducerAction
{
  ProducerActionKind kind;
  FaceId face = INVALID_FACE;
  FrameIndex frame = 0;
  std::uint32_t chunk = 0;
  std::uint32_t bytes = 0;
  DataPtr data;                 ///< sendData
  Notification notification;    ///< notify
};

/// Window snapshot (b_min, b_max, p_min, p_max), compared by the reference tests.
struct ProducerWindows
{
  FrameIndex bMin = 0;
  FrameIndex bMax = 0;
  FrameIndex pMin = 0;
  FrameIndex pMax = 0;

  bool operator==(const ProducerWindows&) const = default;
};

struct ProducerCounters
{
  std::uint64_t published = 0;
  std::uint64_t notifications = 0;
  std::uint64_t satisfied = 0;
  std::uint64_t droppedUnfair = 0;
  std::uint64_t droppedStale = 0;
  std::uint64_t droppedNoChunk = 0;
  std::uint64_t adaptations = 0;
};

/** \brief Producer data plane: content publish and Interest processing.
 *
 *  Pure state machine. The caller hands in frames and Interests and performs
 *  the returned actions (send Data on a face, pass a notification to the
 *  Sync-Agent). Interest lifetimes are not tracked here.
 */
class Producer
{
public:
  /// base names the stream; its frame/chunk fields are ignored.
  Producer(ProducerConfig cfg, ContentName base);

  /// \throw SequenceError if the index is not the next one
  /// \throw InvalidFrameError for a zero-size frame
  std::vector<ProducerAction>
  publish(const EncodedFrame& frame, SimTime now);

  std::vector<ProducerAction>
  processInterest(const Interest& interest, FaceId face, SimTime now);

  /// Next N_i for a key frame anchor.
  /// \throw ContractViolation if the anchor is not a key-frame index
  Notification
  issueNotification(FrameIndex keyFrame, SimTime now);

  ProducerWindows
  windows() const
  {
    return {m_bMin, m_bMax, m_pMin, m_pMax};
  }

  bool
  hasPublished() const
  {
    return m_published;
  }

  std::uint32_t
  kNotify() const
  {
    return m_cfg.kNotify;
  }

  double
  notifyInterval() const
  {
    return m_cfg.notifyInterval();
  }

  const ProducerConfig&
  config() const
  {
    return m_cfg;
  }

  const ContentName&
  base() const
  {
    return m_base;
  }

  const ProducerCounters&
  counters() const
  {
    return m_counters;
  }

  /// Frame indices currently held in the content buffer.
  std::vector<FrameIndex>
  storedFrames() const;

  /// Frames with at least one pending Interest, and the pending chunk count.
  std::map<FrameIndex, std::size_t>
  pendingFrames() const;

private:
  struct StoredFrame
  {
    std::vector<DataPtr> chunks;
    std::set<std::uint32_t> forwarded;
  };

  bool
  fills(FrameIndex frame) const;

  void
  forward(StoredFrame& sf, FrameIndex frame, std::uint32_t chunk, FaceId face,
          std::vector<ProducerAction>& out);

  void
  updateWindows(std::vector<ProducerAction>& out);

  ProducerConfig m_cfg;
  ContentName m_base;
  bool m_published = false;
  FrameIndex m_bMin = 0;
  FrameIndex m_bMax = 0;
  FrameIndex m_pMin = 0;
  FrameIndex m_pMax = 0;
  std::map<FrameIndex, StoredFrame> m_content;
  std::set<FrameIndex> m_partial; ///< published frames forwarded in part (awaiting repair)
  std::map<FrameIndex, std::map<std::uint32_t, std::vector<FaceId>>> m_pending;
  std::uint64_t m_notificationIndex = 0;
  ProducerCounters m_counters;
};

} // namespace srmca

#endif // SRMCA_PRODUCER_HPP
