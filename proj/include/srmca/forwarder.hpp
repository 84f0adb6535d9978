#ifndef SRMCA_FORWARDER_HPP
#define SRMCA_FORWARDER_HPP

#include "srmca/name.hpp"

#include <list>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace srmca {

/// Per-chunk frame metadata appended by the producer.
struct FrameDescriptor
{
  FrameIndex frameIndex = 0;
  FrameType type = FrameType::delta;
  std::uint32_t totalChunks = 1;
  double mediaTimestamp = 0.0;

  bool operator==(const FrameDescriptor&) const = default;
};

struct DataObject
{
  ContentName name;
  std::uint32_t payloadSize = 0;
  FrameDescriptor meta;
  SimTime generationTime = 0.0;

  /// \throw ContractViolation if total_chunks < 1 or chunk >= total_chunks
  void
  validate() const;
};

using DataPtr = std::shared_ptr<const DataObject>;

struct Interest
{
  ContentName name;
  double lifetime = 4000.0;
  SimTime issueTime = 0.0;
  NodeId origin = 0;
};

/** \brief Prefix table with longest-prefix-match lookup.
 *
 *  Adding a more specific entry never changes lookups for names outside it.
 */
class Fib
{
public:
  void
  insert(const Name& prefix, FaceId face);

  void
  erase(const Name& prefix);

  /// \return next hops of the longest matching prefix, or nullptr
  const std::vector<FaceId>*
  findLongestPrefixMatch(const Name& name) const;

  std::size_t
  size() const
  {
    return m_entries.size();
  }

private:
  std::map<Name, std::vector<FaceId>> m_entries;
  std::size_t m_maxPrefixLength = 0;
};

struct PitInRecord
{
  FaceId face = INVALID_FACE;
  SimTime expiry = 0.0;
};

struct PitEntry
{
  std::vector<PitInRecord> inRecords;
  SimTime expiry = 0.0;
};

/// At most one entry per exact name; extra requesters aggregate as in-records.
class Pit
{
public:
  /// Unexpired entry for the name, or nullptr.
  PitEntry*
  find(const ContentName& name, SimTime now);

  PitEntry&
  insert(const ContentName& name);

  void
  erase(const ContentName& name);

  /// Drops expired entries and in-records.
  std::size_t
  purgeExpired(SimTime now);

  std::size_t
  size() const
  {
    return m_table.size();
  }

private:
  std::unordered_map<ContentName, PitEntry, ContentNameHash> m_table;
};

/// Bounded LRU cache of Data objects.
class ContentStore
{
public:
  explicit
  ContentStore(std::size_t capacity = 1024);

  DataPtr
  find(const ContentName& name);

  /// \return evicted object, if the store was full
  DataPtr
  insert(DataPtr data);

  std::size_t
  size() const
  {
    return m_lru.size();
  }

  std::size_t
  capacity() const
  {
    return m_capacity;
  }

private:
  std::size_t m_capacity;
  std::list<DataPtr> m_lru; // front = most recently used
  std::unordered_map<ContentName, std::list<DataPtr>::iterator, ContentNameHash> m_index;
};

enum class ForwarderActionKind : std::uint8_t {
  sendData,
  forwardInterest,
  aggregate,
  noRoute,
  dropUnsolicited,
  cacheInsert,
  cacheEvict,
};

std::string_view
toString(ForwarderActionKind k);

struct ForwarderAction
{
  ForwarderActionKind kind;
  FaceId face = INVALID_FACE;
  DataPtr data; ///< sendData / cacheInsert / cacheEvict
};

struct ForwarderCounters
{
  std::uint64_t nInInterests = 0;
  std::uint64_t nInData = 0;
  std::uint64_t nCacheHits = 0;
  std::uint64_t nAggregated = 0;
  std::uint64_t nRetransmitted = 0;
  std::uint64_t nNoRoute = 0;
  std::uint64_t nUnsolicited = 0;
  std::uint64_t nCancelled = 0;
};

/** \brief CCN forwarder state machine (PIT, FIB, content store).
 *
 *  Each call is a transition (state, packet, time) -> actions; the caller owns
 *  the faces and performs the returned actions.
 */
class Forwarder
{
public:
  explicit
  Forwarder(std::size_t csCapacity = 1024)
    : m_cs(csCapacity)
  {
  }

  std::vector<ForwarderAction>
  onInterest(const Interest& interest, FaceId ingress, SimTime now);

  std::vector<ForwarderAction>
  onData(const DataPtr& data, FaceId ingress, SimTime now);

  /// Local Interest cancellation: removes the face's in-record for the name.
  bool
  cancelInterest(const ContentName& name, FaceId face);

  std::size_t
  purgeExpired(SimTime now)
  {
    return m_pit.purgeExpired(now);
  }

  Fib&
  fib()
  {
    return m_fib;
  }

  const Pit&
  pit() const
  {
    return m_pit;
  }

  const ContentStore&
  contentStore() const
  {
    return m_cs;
  }

  const ForwarderCounters&
  counters() const
  {
    return m_counters;
  }

private:
  FaceId
  route(const Interest& interest, FaceId ingress) const;

  Fib m_fib;
  Pit m_pit;
  ContentStore m_cs;
  ForwarderCounters m_counters;
};

} // namespace srmca

#endif // SRMCA_FORWARDER_HPP
