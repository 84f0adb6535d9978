#include "srmca/media.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace srmca {

namespace {

std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum Salt : std::uint64_t { SIZE = 1, OVERSIZE = 2, OVERSIZE_SIZE = 3 };

} // namespace

std::uint64_t
FrameHash::bits(FrameIndex index, std::uint64_t salt) const
{
  std::uint64_t h = splitmix64(m_seed);
  h = splitmix64(h ^ m_stream);
  h = splitmix64(h ^ static_cast<std::uint64_t>(index));
  return splitmix64(h ^ salt);
}

double
FrameHash::unit(FrameIndex index, std::uint64_t salt) const
{
  return static_cast<double>(bits(index, salt) >> 11) * 0x1.0p-53;
}

std::uint32_t
FrameHash::uniform(FrameIndex index, std::uint64_t salt, SizeRange r) const
{
  if (r.hi <= r.lo)
    return r.lo;
  const std::uint64_t span = std::uint64_t{r.hi} - r.lo + 1;
  return r.lo + static_cast<std::uint32_t>(bits(index, salt) % span);
}

VideoModel::VideoModel(VideoModelConfig cfg, std::uint64_t seed, std::uint64_t stream)
  : m_cfg(cfg)
  , m_hash(seed, stream)
{
  if (m_cfg.gopSize < 1 || m_cfg.fps <= 0)
    throw ContractViolation("video model needs gop >= 1 and fps > 0");
  if (m_cfg.key.lo < 1 || m_cfg.delta.lo < 1 || m_cfg.oversize.lo < 1)
    throw ContractViolation("frame sizes must be >= 1 byte");
}

EncodedFrame
VideoModel::frame(FrameIndex index) const
{
  EncodedFrame f;
  f.index = index;
  f.mediaTimestamp = static_cast<double>(index) * 1000.0 / m_cfg.fps;
  if (index % m_cfg.gopSize == 0) {
    f.type = FrameType::key;
    f.size = m_hash.uniform(index, SIZE, m_cfg.key);
  }
  else {
    f.type = FrameType::delta;
    if (m_hash.unit(index, OVERSIZE) < m_cfg.oversizeProbability)
      f.size = m_hash.uniform(index, OVERSIZE_SIZE, m_cfg.oversize);
    else
      f.size = m_hash.uniform(index, SIZE, m_cfg.delta);
  }
  return f;
}

AudioModel::AudioModel(double bitrateBps, double frameIntervalMs)
  : m_interval(frameIntervalMs)
{
  if (bitrateBps <= 0 || frameIntervalMs <= 0)
    throw ContractViolation("audio model needs positive bitrate and interval");
  const double bytes = bitrateBps * frameIntervalMs / 1000.0 / 8.0;
  m_payload = static_cast<std::uint32_t>(std::llround(bytes));
  if (m_payload < 1 || std::abs(bytes - m_payload) > 1e-9)
    throw ContractViolation("audio bitrate and interval must give a whole-byte payload");
}

EncodedFrame
AudioModel::frame(FrameIndex index) const
{
  return {index, FrameType::audio, m_payload, static_cast<double>(index) * m_interval};
}

TextModel::TextModel(double intervalMs, SizeRange size, std::uint64_t seed, std::uint64_t stream)
  : m_interval(intervalMs)
  , m_size(size)
  , m_hash(seed, stream)
{
  if (intervalMs <= 0 || size.lo < 1)
    throw ContractViolation("text model needs interval > 0 and size >= 1");
}

EncodedFrame
TextModel::frame(FrameIndex index) const
{
  return {index, FrameType::text, m_hash.uniform(index, SIZE, m_size),
          static_cast<double>(index) * m_interval};
}

std::uint32_t
chunkCount(std::uint32_t size, std::uint32_t chunkSize, MediaType media)
{
  if (chunkSize < 1)
    throw ContractViolation("chunk size must be >= 1");
  if (media != MediaType::video)
    return 1;
  return std::max<std::uint32_t>(1, (size + chunkSize - 1) / chunkSize);
}

std::vector<DataObject>
chunkFrame(const EncodedFrame& frame, std::uint32_t chunkSize, const ContentName& base,
           SimTime generationTime)
{
  if (frame.size == 0)
    throw InvalidFrameError("frame " + std::to_string(frame.index) + " has zero size");
  const std::uint32_t n = chunkCount(frame.size, chunkSize, base.media);

  std::vector<DataObject> out;
  out.reserve(n);
  std::uint32_t left = frame.size;
  for (std::uint32_t c = 0; c < n; ++c) {
    DataObject d;
    d.name = base;
    d.name.frame = static_cast<std::uint64_t>(frame.index);
    d.name.chunk = c;
    d.payloadSize = n == 1 ? left : std::min(left, chunkSize);
    d.meta = {frame.index, frame.type, n, frame.mediaTimestamp};
    d.generationTime = generationTime;
    left -= d.payloadSize;
    out.push_back(std::move(d));
  }
  return out;
}

void
writeFrameTrace(std::ostream& os, const std::vector<EncodedFrame>& frames)
{
  os << "index,type,bytes\n";
  for (const auto& f : frames)
    os << f.index << ',' << toString(f.type) << ',' << f.size << '\n';
}

std::vector<EncodedFrame>
readFrameTrace(std::istream& is, double frameInterval)
{
  std::vector<EncodedFrame> out;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (line.empty() || (lineNo == 1 && line.starts_with("index")))
      continue;
    std::istringstream row(line);
    std::string idx, type, bytes;
    if (!std::getline(row, idx, ',') || !std::getline(row, type, ',') || !std::getline(row, bytes))
      throw std::runtime_error("frame trace line " + std::to_string(lineNo) + ": expected 3 fields");
    try {
      EncodedFrame f;
      f.index = std::stoll(idx);
      f.type = parseFrameType(type);
      const long long b = std::stoll(bytes);
      if (b < 1)
        throw std::invalid_argument("size must be >= 1");
      f.size = static_cast<std::uint32_t>(b);
      f.mediaTimestamp = static_cast<double>(f.index) * frameInterval;
      out.push_back(f);
    }
    catch (const std::exception& e) {
      throw std::runtime_error("frame trace line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

} // namespace srmca
