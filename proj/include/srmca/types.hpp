#ifndef SRMCA_TYPES_HPP
#define SRMCA_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace srmca {

/// Simulation time in milliseconds. Every module runs on simulated time only.
using SimTime = double;

using NodeId = std::uint32_t;
using FaceId = std::uint32_t;
using FrameIndex = std::int64_t;

inline constexpr FaceId INVALID_FACE = 0xFFFFFFFF;

enum class MediaType : std::uint8_t { audio, video, text };

enum class FrameType : std::uint8_t { key, delta, audio, text };

std::string_view toString(MediaType m);
std::string_view toString(FrameType t);

/// Throws std::invalid_argument for anything other than audio|video|text.
MediaType parseMediaType(std::string_view s);
FrameType parseFrameType(std::string_view s);

/// Violated precondition of an operation (distinct from bad user input).
class ContractViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

} // namespace srmca

#endif // SRMCA_TYPES_HPP
