#ifndef SRMCA_NAME_HPP
#define SRMCA_NAME_HPP

#include "srmca/types.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace srmca {

class InvalidNameError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidSuffixError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/** \brief Generic hierarchical name: an ordered list of non-empty components.
 *
 *  Textual form is "/c0/c1/...". The root name "/" has no components.
 */
class Name
{
public:
  Name() = default;

  explicit
  Name(std::vector<std::string> components);

  /// Parses "/a/b/c". Empty components ("//") are rejected.
  static Name
  parse(std::string_view uri);

  std::string
  toUri() const;

  std::size_t
  size() const
  {
    return m_components.size();
  }

  const std::string&
  at(std::size_t i) const
  {
    return m_components.at(i);
  }

  const std::vector<std::string>&
  components() const
  {
    return m_components;
  }

  Name
  getPrefix(std::size_t n) const;

  bool
  isPrefixOf(const Name& other) const;

  Name&
  append(std::string component);

  auto operator<=>(const Name&) const = default;
  bool operator==(const Name&) const = default;

private:
  std::vector<std::string> m_components;
};

/** \brief Data name of one media chunk:
 *  /<CSR-Gateway-ID>/<Conf-Session-ID>/<UE-ID>/<Media-Type>/<Media-Suffix>
 *
 *  Media suffix is (frame, chunk) for video, (frame) for audio and (message) for
 *  text. For audio and text `chunk` is always 0 and is not serialized.
 */
struct ContentName
{
  std::string csr;
  std::string conf;
  std::string ue;
  MediaType media = MediaType::video;
  std::uint64_t frame = 0;
  std::uint32_t chunk = 0;

  std::string
  toUri() const;

  Name
  toName() const;

  /// Inverse of toUri(); throws InvalidNameError / InvalidSuffixError.
  static ContentName
  parse(std::string_view uri);

  static ContentName
  fromName(const Name& name);

  /// Same producer stream (everything except frame and chunk).
  bool
  sameStream(const ContentName& other) const
  {
    return media == other.media && ue == other.ue && conf == other.conf && csr == other.csr;
  }

  auto operator<=>(const ContentName&) const = default;
  bool operator==(const ContentName&) const = default;
};

/** \brief Builds a data name from its components.
 *  \throw InvalidNameError an identifier component is empty or contains '/'
 *  \throw InvalidSuffixError suffix arity does not match the media type
 */
ContentName
makeDataName(std::string_view csr, std::string_view conf, std::string_view ue,
             MediaType media, std::span<const std::uint64_t> suffix);

/// Number of suffix components a data name of this media type carries.
std::size_t
suffixArity(MediaType media);

/// Identifier rules shared by every name component that is not an integer.
void
checkIdentifier(std::string_view id, std::string_view what);

struct ContentNameHash
{
  std::size_t
  operator()(const ContentName& n) const noexcept;
};

} // namespace srmca

#endif // SRMCA_NAME_HPP
