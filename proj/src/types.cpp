#include "srmca/types.hpp"

namespace srmca {

std::string_view
toString(MediaType m)
{
  switch (m) {
    case MediaType::audio: return "audio";
    case MediaType::video: return "video";
    case MediaType::text: return "text";
  }
  return "?";
}

std::string_view
toString(FrameType t)
{
  switch (t) {
    case FrameType::key: return "key";
    case FrameType::delta: return "delta";
    case FrameType::audio: return "audio";
    case FrameType::text: return "text";
  }
  return "?";
}

MediaType
parseMediaType(std::string_view s)
{
  if (s == "audio")
    return MediaType::audio;
  if (s == "video")
    return MediaType::video;
  if (s == "text")
    return MediaType::text;
  throw std::invalid_argument("unknown media type '" + std::string(s) + "'");
}

FrameType
parseFrameType(std::string_view s)
{
  if (s == "key")
    return FrameType::key;
  if (s == "delta")
    return FrameType::delta;
  if (s == "audio")
    return FrameType::audio;
  if (s == "text")
    return FrameType::text;
  throw std::invalid_argument("unknown frame type '" + std::string(s) + "'");
}

} // namespace srmca
