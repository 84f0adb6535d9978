#include "srmca/sync.hpp"

#include <charconv>

namespace srmca {

std::string
Fingerprint::toComponent() const
{
  return conf + ':' + ue + ':' + std::string(toString(media)) + ':' + std::to_string(anchor);
}

Fingerprint
Fingerprint::parseComponent(std::string_view c)
{
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    auto next = c.find(':', pos);
    parts.push_back(c.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos)
      break;
    pos = next + 1;
  }
  if (parts.size() != 4)
    throw InvalidNameError("fingerprint needs 4 fields: '" + std::string(c) + "'");

  Fingerprint fp;
  checkIdentifier(parts[0], "conference session id");
  checkIdentifier(parts[1], "UE id");
  fp.conf = parts[0];
  fp.ue = parts[1];
  try {
    fp.media = parseMediaType(parts[2]);
  }
  catch (const std::invalid_argument& e) {
    throw InvalidNameError(e.what());
  }
  auto [ptr, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), fp.anchor);
  if (ec != std::errc{} || ptr != parts[3].data() + parts[3].size() || fp.anchor < 0)
    throw InvalidNameError("bad fingerprint anchor '" + std::string(parts[3]) + "'");
  return fp;
}

Name
NotificationName::toName() const
{
  checkIdentifier(csr, "CSR gateway id");
  checkIdentifier(serviceFunctionId, "service function id");
  return Name({csr, serviceFunctionId, fingerprint.toComponent()});
}

NotificationName
NotificationName::fromName(const Name& name)
{
  if (name.size() != 3)
    throw InvalidNameError("notification name needs 3 components: " + name.toUri());
  return {name.at(0), name.at(1), Fingerprint::parseComponent(name.at(2))};
}

NameClass
classifyName(const Name& name)
{
  if (name.size() == 3)
    return NameClass::notification;
  if (name.size() >= 5) {
    try {
      parseMediaType(name.at(3));
      return NameClass::data;
    }
    catch (const std::invalid_argument&) {
    }
  }
  throw InvalidNameError("name is neither a data nor a notification name: " + name.toUri());
}

FrameIndex
keyFrameIndex(FrameIndex frame, std::uint32_t gopSize)
{
  if (gopSize < 1)
    throw ContractViolation("GOP size must be >= 1");
  if (frame < 0)
    throw ContractViolation("negative frame index");
  return static_cast<FrameIndex>(gopSize) * (frame / static_cast<FrameIndex>(gopSize));
}

Fingerprint
deriveFingerprint(const ContentName& name, std::uint32_t gopSize)
{
  return {name.conf, name.ue, name.media, keyFrameIndex(static_cast<FrameIndex>(name.frame), gopSize)};
}

Fingerprint
deriveFingerprint(const Name& name, std::uint32_t gopSize)
{
  if (classifyName(name) != NameClass::data)
    throw WrongNameClassError("fingerprints derive from data names, got notification name " + name.toUri());
  return deriveFingerprint(ContentName::fromName(name), gopSize);
}

// ---- NotificationHistory

NotificationHistory::NotificationHistory(std::size_t depth)
  : m_depth(std::max<std::size_t>(depth, 1))
{
}

bool
NotificationHistory::append(const Notification& n)
{
  auto& list = m_sessions[n.fingerprint.conf][ProducerKey::of(n)];
  if (!list.empty() && n.index <= list.back().index)
    return false;
  list.push_back(n);
  while (list.size() > m_depth)
    list.pop_front();
  return true;
}

std::optional<Notification>
NotificationHistory::latest(const std::string& conf, const ProducerKey& producer) const
{
  auto s = m_sessions.find(conf);
  if (s == m_sessions.end())
    return std::nullopt;
  auto p = s->second.find(producer);
  if (p == s->second.end() || p->second.empty())
    return std::nullopt;
  return p->second.back();
}

std::vector<Notification>
NotificationHistory::latestPerProducer(const std::string& conf) const
{
  std::vector<Notification> out;
  auto s = m_sessions.find(conf);
  if (s == m_sessions.end())
    return out;
  for (const auto& [key, list] : s->second)
    if (!list.empty())
      out.push_back(list.back());
  return out;
}

std::size_t
NotificationHistory::size(const std::string& conf, const ProducerKey& producer) const
{
  auto s = m_sessions.find(conf);
  if (s == m_sessions.end())
    return 0;
  auto p = s->second.find(producer);
  return p == s->second.end() ? 0 : p->second.size();
}

std::string_view
toString(SyncActionKind k)
{
  switch (k) {
    case SyncActionKind::toManager: return "proxy->manager";
    case SyncActionKind::toProxy: return "manager->proxy";
    case SyncActionKind::toAgent: return "proxy->agent";
    case SyncActionKind::membership: return "membership";
    case SyncActionKind::controllerEvent: return "controller-event";
    case SyncActionKind::dropStale: return "drop-stale";
  }
  return "?";
}

// ---- SyncProxy

SyncProxy::SyncProxy(std::string id, std::set<std::string> provisionedSessions, std::size_t historyDepth)
  : m_id(std::move(id))
  , m_provisioned(std::move(provisionedSessions))
  , m_history(historyDepth)
{
}

const std::map<std::string, bool>&
SyncProxy::members(const std::string& conf) const
{
  static const std::map<std::string, bool> empty;
  auto it = m_members.find(conf);
  return it == m_members.end() ? empty : it->second;
}

bool
SyncProxy::sessionInterested(const std::string& conf) const
{
  for (const auto& [ue, interested] : members(conf))
    if (interested)
      return true;
  return false;
}

std::vector<SyncAction>
SyncProxy::registerAgent(const std::string& conf, const std::string& ue, bool interested)
{
  if (!m_provisioned.contains(conf))
    throw SessionNotProvisionedError("session '" + conf + "' is not provisioned at proxy " + m_id);

  std::vector<SyncAction> out;
  auto& members = m_members[conf];
  auto it = members.find(ue);
  if (it != members.end() && it->second == interested)
    return out;

  const bool firstMember = members.empty();
  const bool isNew = it == members.end();
  members[ue] = interested;

  if (isNew) {
    SyncAction ev{SyncActionKind::controllerEvent, ue, {}, conf};
    out.push_back(std::move(ev));
  }

  const bool nowInterested = sessionInterested(conf);
  auto reported = m_reportedInterest.find(conf);
  if (firstMember || reported == m_reportedInterest.end() || reported->second != nowInterested) {
    SyncAction m{SyncActionKind::membership, "", {}, conf};
    m.interested = nowInterested;
    out.push_back(std::move(m));
    m_reportedInterest[conf] = nowInterested;
  }

  if (interested) {
    auto replay = resync(conf, ue);
    out.insert(out.end(), replay.begin(), replay.end());
  }
  return out;
}

std::vector<SyncAction>
SyncProxy::deregisterAgent(const std::string& conf, const std::string& ue)
{
  std::vector<SyncAction> out;
  auto s = m_members.find(conf);
  if (s == m_members.end() || s->second.erase(ue) == 0)
    return out;

  SyncAction ev{SyncActionKind::controllerEvent, ue, {}, conf};
  ev.joined = false;
  out.push_back(std::move(ev));

  const bool empty = s->second.empty();
  const bool nowInterested = sessionInterested(conf);
  if (empty || m_reportedInterest[conf] != nowInterested) {
    SyncAction m{SyncActionKind::membership, "", {}, conf};
    m.interested = nowInterested;
    m.joined = !empty;
    out.push_back(std::move(m));
    m_reportedInterest[conf] = nowInterested;
  }
  if (empty) {
    m_members.erase(s);
    m_reportedInterest.erase(conf);
  }
  return out;
}

void
SyncProxy::fanOutLocal(const Notification& n, std::vector<SyncAction>& out) const
{
  for (const auto& [ue, interested] : members(n.fingerprint.conf)) {
    if (interested && ue != n.fingerprint.ue)
      out.push_back({SyncActionKind::toAgent, ue, n});
  }
}

std::vector<SyncAction>
SyncProxy::onAgentNotify(const Notification& n)
{
  std::vector<SyncAction> out;
  if (!m_history.append(n)) {
    ++m_staleDropped;
    out.push_back({SyncActionKind::dropStale, n.fingerprint.ue, n});
    return out;
  }
  out.push_back({SyncActionKind::toManager, "", n});
  fanOutLocal(n, out);
  return out;
}

std::vector<SyncAction>
SyncProxy::onManagerNotify(const Notification& n)
{
  std::vector<SyncAction> out;
  if (!m_history.append(n)) {
    ++m_staleDropped;
    out.push_back({SyncActionKind::dropStale, n.fingerprint.ue, n});
    return out;
  }
  fanOutLocal(n, out);
  return out;
}

std::vector<SyncAction>
SyncProxy::resync(const std::string& conf, const std::string& ue) const
{
  std::vector<SyncAction> out;
  for (auto& n : m_history.latestPerProducer(conf))
    if (n.fingerprint.ue != ue)
      out.push_back({SyncActionKind::toAgent, ue, n});
  return out;
}

// ---- SyncManager

SyncManager::SyncManager(std::size_t historyDepth)
  : m_history(historyDepth)
{
}

void
SyncManager::addProxy(const std::string& proxy)
{
  m_proxies.insert(proxy);
}

const std::map<std::string, bool>&
SyncManager::sessionMembership(const std::string& conf) const
{
  static const std::map<std::string, bool> empty;
  auto it = m_membership.find(conf);
  return it == m_membership.end() ? empty : it->second;
}

std::vector<SyncAction>
SyncManager::onMembership(const std::string& proxy, const std::string& conf, bool joined, bool interested)
{
  if (!m_proxies.contains(proxy))
    throw UnknownSourceError("unknown proxy '" + proxy + "'");

  std::vector<SyncAction> out;
  auto& members = m_membership[conf];
  if (!joined) {
    members.erase(proxy);
    return out;
  }
  auto it = members.find(proxy);
  const bool wasInterested = it != members.end() && it->second;
  members[proxy] = interested;
  if (interested && !wasInterested) {
    for (auto& n : m_history.latestPerProducer(conf))
      out.push_back({SyncActionKind::toProxy, proxy, n});
  }
  return out;
}

std::vector<SyncAction>
SyncManager::relay(const Notification& n, const std::string& from)
{
  if (!m_proxies.contains(from))
    throw UnknownSourceError("notification from unknown proxy '" + from + "'");

  std::vector<SyncAction> out;
  if (!m_history.append(n)) {
    ++m_staleDropped;
    out.push_back({SyncActionKind::dropStale, from, n});
    return out;
  }
  for (const auto& [proxy, interested] : sessionMembership(n.fingerprint.conf)) {
    if (proxy != from && interested)
      out.push_back({SyncActionKind::toProxy, proxy, n});
  }
  return out;
}

// ---- SyncAgent

bool
SyncAgent::accept(const Notification& n)
{
  auto key = ProducerKey::of(n);
  auto it = m_delivered.find(key);
  if (it != m_delivered.end() && n.fingerprint.anchor <= it->second)
    return false;
  m_delivered[key] = n.fingerprint.anchor;
  return true;
}

std::optional<FrameIndex>
SyncAgent::lastAnchor(const ProducerKey& producer) const
{
  auto it = m_delivered.find(producer);
  if (it == m_delivered.end())
    return std::nullopt;
  return it->second;
}

} // namespace srmca
