#ifndef SRMCA_SYNC_HPP
#define SRMCA_SYNC_HPP

#include "srmca/name.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace srmca {

class WrongNameClassError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class SessionNotProvisionedError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class UnknownSourceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/** \brief Latest namespace state of one producer stream.
 *
 *  Kept as the canonical tuple: equality and ordering are all the framework
 *  needs. The anchor is always a key-frame index.
 */
struct Fingerprint
{
  std::string conf;
  std::string ue;
  MediaType media = MediaType::video;
  FrameIndex anchor = 0;

  /// Single name component "conf:ue:media:anchor".
  std::string
  toComponent() const;

  static Fingerprint
  parseComponent(std::string_view component);

  auto operator<=>(const Fingerprint&) const = default;
  bool operator==(const Fingerprint&) const = default;
};

/// /<CSR-Gateway-ID>/<Service-Function-ID>/<Fingerprint>
struct NotificationName
{
  std::string csr;
  std::string serviceFunctionId;
  Fingerprint fingerprint;

  Name
  toName() const;

  std::string
  toUri() const
  {
    return toName().toUri();
  }

  static NotificationName
  fromName(const Name& name);

  bool operator==(const NotificationName&) const = default;
};

enum class NameClass : std::uint8_t { data, notification };

/// Data names have a media type in their fourth component; notification names
/// have exactly three components.
NameClass
classifyName(const Name& name);

/// iota(i) = gop * floor(i / gop)
FrameIndex
keyFrameIndex(FrameIndex frame, std::uint32_t gopSize);

Fingerprint
deriveFingerprint(const ContentName& name, std::uint32_t gopSize);

/// \throw WrongNameClassError for notification names
Fingerprint
deriveFingerprint(const Name& name, std::uint32_t gopSize);

struct Notification
{
  std::uint64_t index = 0; ///< N_i, per producer stream
  Fingerprint fingerprint;
  SimTime issueTime = 0.0;

  bool operator==(const Notification&) const = default;
};

/// One notification stream: a producer UE and a media type.
struct ProducerKey
{
  std::string ue;
  MediaType media = MediaType::video;

  static ProducerKey
  of(const Notification& n)
  {
    return {n.fingerprint.ue, n.fingerprint.media};
  }

  auto operator<=>(const ProducerKey&) const = default;
  bool operator==(const ProducerKey&) const = default;
};

/// Per-session, per-producer bounded history ordered by N_i.
class NotificationHistory
{
public:
  explicit
  NotificationHistory(std::size_t depth = 8);

  /// \return false if n.index is not newer than the last entry (stale)
  bool
  append(const Notification& n);

  std::optional<Notification>
  latest(const std::string& conf, const ProducerKey& producer) const;

  std::vector<Notification>
  latestPerProducer(const std::string& conf) const;

  std::size_t
  depth() const
  {
    return m_depth;
  }

  std::size_t
  size(const std::string& conf, const ProducerKey& producer) const;

private:
  std::size_t m_depth;
  std::map<std::string, std::map<ProducerKey, std::deque<Notification>>> m_sessions;
};

enum class SyncActionKind : std::uint8_t {
  toManager,        ///< proxy -> manager notification
  toProxy,          ///< manager -> proxy notification
  toAgent,          ///< proxy -> agent notification
  membership,       ///< proxy -> manager (de)registration for a session
  controllerEvent,  ///< proxy -> conference network controller (modeled)
  dropStale,
};

std::string_view
toString(SyncActionKind k);

struct SyncAction
{
  SyncActionKind kind;
  std::string target; ///< proxy id, agent (UE) id, or empty
  Notification notification;
  std::string conf;          ///< membership / controllerEvent
  bool interested = false;   ///< membership: proxy has >= 1 interested member
  bool joined = true;        ///< membership / controllerEvent: join vs leave
};

/// Sync-Proxy hosted on a CSR/VSER.
class SyncProxy
{
public:
  SyncProxy(std::string id, std::set<std::string> provisionedSessions, std::size_t historyDepth = 8);

  /** \brief Agent registration. Idempotent.
   *
   *  Emits a controller event and, when the proxy's aggregate membership for the
   *  session changes, a membership update toward the manager. The latest
   *  notification of every other known producer is replayed to the agent.
   *  \throw SessionNotProvisionedError
   */
  std::vector<SyncAction>
  registerAgent(const std::string& conf, const std::string& ue, bool interested);

  std::vector<SyncAction>
  deregisterAgent(const std::string& conf, const std::string& ue);

  /// Notification from a local agent: history + one copy to the manager +
  /// copies to local interested agents other than the producer.
  std::vector<SyncAction>
  onAgentNotify(const Notification& n);

  /// Notification relayed by the manager: history + local fan-out.
  std::vector<SyncAction>
  onManagerNotify(const Notification& n);

  /// Replays latest history entries to one agent (reconnect recovery).
  std::vector<SyncAction>
  resync(const std::string& conf, const std::string& ue) const;

  std::optional<Notification>
  historyQuery(const std::string& conf, const ProducerKey& producer) const
  {
    return m_history.latest(conf, producer);
  }

  const std::string&
  id() const
  {
    return m_id;
  }

  /// Registered agents of a session (ue -> interested).
  const std::map<std::string, bool>&
  members(const std::string& conf) const;

  std::uint64_t
  staleDropped() const
  {
    return m_staleDropped;
  }

private:
  bool
  sessionInterested(const std::string& conf) const;

  void
  fanOutLocal(const Notification& n, std::vector<SyncAction>& out) const;

  std::string m_id;
  std::set<std::string> m_provisioned;
  std::map<std::string, std::map<std::string, bool>> m_members;
  std::map<std::string, bool> m_reportedInterest; ///< what the manager was last told
  NotificationHistory m_history;
  std::uint64_t m_staleDropped = 0;
};

/// Central hub relaying notifications between proxies.
class SyncManager
{
public:
  explicit
  SyncManager(std::size_t historyDepth = 8);

  void
  addProxy(const std::string& proxy);

  /** \brief Proxy membership update for a session.
   *
   *  A proxy that becomes interested gets the latest notification of each
   *  producer in the session replayed to it.
   *  \throw UnknownSourceError
   */
  std::vector<SyncAction>
  onMembership(const std::string& proxy, const std::string& conf, bool joined, bool interested);

  /// One copy to every other interested member proxy of the session.
  /// \throw UnknownSourceError
  std::vector<SyncAction>
  relay(const Notification& n, const std::string& from);

  std::optional<Notification>
  historyQuery(const std::string& conf, const ProducerKey& producer) const
  {
    return m_history.latest(conf, producer);
  }

  const std::set<std::string>&
  proxies() const
  {
    return m_proxies;
  }

  /// proxy -> interested, for proxies that registered in the session
  const std::map<std::string, bool>&
  sessionMembership(const std::string& conf) const;

  std::uint64_t
  staleDropped() const
  {
    return m_staleDropped;
  }

private:
  std::set<std::string> m_proxies;
  std::map<std::string, std::map<std::string, bool>> m_membership;
  NotificationHistory m_history;
  std::uint64_t m_staleDropped = 0;
};

/// Sync-Agent on a UE: forwards its producer's notifications and filters
/// delivered ones so anchors seen by the application never regress.
class SyncAgent
{
public:
  SyncAgent(std::string ue, std::string proxy)
    : m_ue(std::move(ue))
    , m_proxy(std::move(proxy))
  {
  }

  const std::string&
  ue() const
  {
    return m_ue;
  }

  const std::string&
  proxy() const
  {
    return m_proxy;
  }

  /// \return true if the notification is newer than anything delivered for
  /// its producer stream; false means it is dropped as stale.
  bool
  accept(const Notification& n);

  std::optional<FrameIndex>
  lastAnchor(const ProducerKey& producer) const;

private:
  std::string m_ue;
  std::string m_proxy;
  std::map<ProducerKey, FrameIndex> m_delivered;
};

} // namespace srmca

#endif // SRMCA_SYNC_HPP
