#include "srmca/name.hpp"

#include <charconv>

namespace srmca {

namespace {

std::uint64_t
parseIndex(const std::string& s, std::string_view what)
{
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() ||
      (s.size() > 1 && s[0] == '0'))
    throw InvalidSuffixError("invalid " + std::string(what) + " component '" + s + "'");
  return v;
}

inline void
hashCombine(std::size_t& seed, std::size_t v)
{
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

} // namespace

Name::Name(std::vector<std::string> components)
  : m_components(std::move(components))
{
  for (const auto& c : m_components)
    if (c.empty())
      throw InvalidNameError("empty name component");
}

Name
Name::parse(std::string_view uri)
{
  if (uri.empty() || uri.front() != '/')
    throw InvalidNameError("name must start with '/': '" + std::string(uri) + "'");
  std::vector<std::string> comps;
  std::size_t pos = 1;
  while (pos < uri.size()) {
    auto next = uri.find('/', pos);
    if (next == std::string_view::npos)
      next = uri.size();
    if (next == pos)
      throw InvalidNameError("empty name component in '" + std::string(uri) + "'");
    comps.emplace_back(uri.substr(pos, next - pos));
    pos = next + 1;
  }
  if (uri.size() > 1 && uri.back() == '/')
    throw InvalidNameError("trailing '/' in '" + std::string(uri) + "'");
  return Name(std::move(comps));
}

std::string
Name::toUri() const
{
  if (m_components.empty())
    return "/";
  std::string out;
  for (const auto& c : m_components) {
    out += '/';
    out += c;
  }
  return out;
}

Name
Name::getPrefix(std::size_t n) const
{
  n = std::min(n, m_components.size());
  return Name(std::vector<std::string>(m_components.begin(), m_components.begin() + n));
}

bool
Name::isPrefixOf(const Name& other) const
{
  if (size() > other.size())
    return false;
  return std::equal(m_components.begin(), m_components.end(), other.m_components.begin());
}

Name&
Name::append(std::string component)
{
  if (component.empty())
    throw InvalidNameError("empty name component");
  m_components.push_back(std::move(component));
  return *this;
}

std::size_t
suffixArity(MediaType media)
{
  return media == MediaType::video ? 2 : 1;
}

void
checkIdentifier(std::string_view id, std::string_view what)
{
  if (id.empty())
    throw InvalidNameError("empty " + std::string(what));
  if (id.find_first_of("/:,") != std::string_view::npos)
    throw InvalidNameError(std::string(what) + " '" + std::string(id) + "' contains a reserved character");
}

ContentName
makeDataName(std::string_view csr, std::string_view conf, std::string_view ue,
             MediaType media, std::span<const std::uint64_t> suffix)
{
  checkIdentifier(csr, "CSR gateway id");
  checkIdentifier(conf, "conference session id");
  checkIdentifier(ue, "UE id");
  if (suffix.size() != suffixArity(media))
    throw InvalidSuffixError(std::string(toString(media)) + " names take " +
                             std::to_string(suffixArity(media)) + " suffix component(s), got " +
                             std::to_string(suffix.size()));
  if (suffix.size() == 2 && suffix[1] > 0xFFFFFFFFULL)
    throw InvalidSuffixError("chunk index out of range");

  ContentName n;
  n.csr = csr;
  n.conf = conf;
  n.ue = ue;
  n.media = media;
  n.frame = suffix[0];
  n.chunk = suffix.size() == 2 ? static_cast<std::uint32_t>(suffix[1]) : 0;
  return n;
}

std::string
ContentName::toUri() const
{
  std::string out;
  out.reserve(csr.size() + conf.size() + ue.size() + 24);
  out += '/';
  out += csr;
  out += '/';
  out += conf;
  out += '/';
  out += ue;
  out += '/';
  out += toString(media);
  out += '/';
  out += std::to_string(frame);
  if (media == MediaType::video) {
    out += '/';
    out += std::to_string(chunk);
  }
  return out;
}

Name
ContentName::toName() const
{
  std::vector<std::string> c{csr, conf, ue, std::string(toString(media)), std::to_string(frame)};
  if (media == MediaType::video)
    c.push_back(std::to_string(chunk));
  return Name(std::move(c));
}

ContentName
ContentName::fromName(const Name& name)
{
  if (name.size() < 5)
    throw InvalidNameError("data name needs at least 5 components: " + name.toUri());
  MediaType media;
  try {
    media = parseMediaType(name.at(3));
  }
  catch (const std::invalid_argument&) {
    throw InvalidNameError("unknown media type in " + name.toUri());
  }
  std::vector<std::uint64_t> suffix;
  for (std::size_t i = 4; i < name.size(); ++i)
    suffix.push_back(parseIndex(name.at(i), "media suffix"));
  return makeDataName(name.at(0), name.at(1), name.at(2), media, suffix);
}

ContentName
ContentName::parse(std::string_view uri)
{
  return fromName(Name::parse(uri));
}

std::size_t
ContentNameHash::operator()(const ContentName& n) const noexcept
{
  std::size_t h = std::hash<std::string>{}(n.ue);
  hashCombine(h, std::hash<std::string>{}(n.csr));
  hashCombine(h, std::hash<std::string>{}(n.conf));
  hashCombine(h, static_cast<std::size_t>(n.media));
  hashCombine(h, std::hash<std::uint64_t>{}(n.frame));
  hashCombine(h, n.chunk);
  return h;
}

} // namespace srmca
