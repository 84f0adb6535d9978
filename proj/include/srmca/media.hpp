#ifndef SRMCA_MEDIA_HPP
#define SRMCA_MEDIA_HPP

#include "srmca/forwarder.hpp"

#include <iosfwd>
#include <vector>

namespace srmca {

class InvalidFrameError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct EncodedFrame
{
  FrameIndex index = 0;
  FrameType type = FrameType::delta;
  std::uint32_t size = 1;   ///< bytes
  double mediaTimestamp = 0.0;

  bool operator==(const EncodedFrame&) const = default;
};

/// Inclusive byte range for a bounded uniform size draw.
struct SizeRange
{
  std::uint32_t lo = 1;
  std::uint32_t hi = 1;
};

/// Stateless hash-based generator: the value for (seed, stream, index, salt)
/// never depends on call order.
class FrameHash
{
public:
  FrameHash(std::uint64_t seed, std::uint64_t stream)
    : m_seed(seed)
    , m_stream(stream)
  {
  }

  std::uint64_t
  bits(FrameIndex index, std::uint64_t salt) const;

  /// uniform in [0, 1)
  double
  unit(FrameIndex index, std::uint64_t salt) const;

  std::uint32_t
  uniform(FrameIndex index, std::uint64_t salt, SizeRange r) const;

private:
  std::uint64_t m_seed;
  std::uint64_t m_stream;
};

struct VideoModelConfig
{
  std::uint32_t gopSize = 25;
  double fps = 25.0;
  SizeRange key{9000, 15000};
  SizeRange delta{600, 3000};
  double oversizeProbability = 0.1;
  SizeRange oversize{3001, 6000};
};

class VideoModel
{
public:
  VideoModel(VideoModelConfig cfg, std::uint64_t seed, std::uint64_t stream);

  /// Deterministic in (seed, stream, index).
  EncodedFrame
  frame(FrameIndex index) const;

  EncodedFrame
  next()
  {
    return frame(m_next++);
  }

  const VideoModelConfig&
  config() const
  {
    return m_cfg;
  }

private:
  VideoModelConfig m_cfg;
  FrameHash m_hash;
  FrameIndex m_next = 0;
};

/// Constant bit rate audio.
class AudioModel
{
public:
  explicit
  AudioModel(double bitrateBps = 30000.0, double frameIntervalMs = 20.0);

  std::uint32_t
  payloadSize() const
  {
    return m_payload;
  }

  double
  frameInterval() const
  {
    return m_interval;
  }

  EncodedFrame
  frame(FrameIndex index) const;

  EncodedFrame
  next()
  {
    return frame(m_next++);
  }

private:
  double m_interval;
  std::uint32_t m_payload;
  FrameIndex m_next = 0;
};

/// Sparse chat-style messages, one per interval.
class TextModel
{
public:
  TextModel(double intervalMs, SizeRange size, std::uint64_t seed, std::uint64_t stream);

  EncodedFrame
  frame(FrameIndex index) const;

  double
  interval() const
  {
    return m_interval;
  }

private:
  double m_interval;
  SizeRange m_size;
  FrameHash m_hash;
};

/// Number of chunks epsilon_i for a frame; audio and text never chunk.
std::uint32_t
chunkCount(std::uint32_t size, std::uint32_t chunkSize, MediaType media);

/// Chunk count a consumer requests for frame k before seeing its metadata
/// (epsilon_ir), shared by producer fill detection and consumer pre-fetching.
inline std::uint32_t
expectedChunks(FrameIndex k, std::uint32_t gopSize, std::uint32_t keyChunks, std::uint32_t deltaChunks)
{
  return k % gopSize == 0 ? keyChunks : deltaChunks;
}

/** \brief Splits a frame into Data objects named under base (chunk set per object).
 *
 *  \throw InvalidFrameError for a zero-size frame
 *  \throw ContractViolation if chunkSize < 1
 */
std::vector<DataObject>
chunkFrame(const EncodedFrame& frame, std::uint32_t chunkSize, const ContentName& base,
           SimTime generationTime);

/// CSV with header "index,type,bytes".
void
writeFrameTrace(std::ostream& os, const std::vector<EncodedFrame>& frames);

/// \throw std::runtime_error on malformed rows
std::vector<EncodedFrame>
readFrameTrace(std::istream& is, double frameInterval);

} // namespace srmca

#endif // SRMCA_MEDIA_HPP
