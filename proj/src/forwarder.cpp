#include "srmca/forwarder.hpp"

#include <algorithm>

namespace srmca {

void
DataObject::validate() const
{
  if (meta.totalChunks < 1)
    throw ContractViolation("data object " + name.toUri() + " has total_chunks < 1");
  if (name.chunk >= meta.totalChunks)
    throw ContractViolation("data object " + name.toUri() + " chunk index beyond total_chunks");
}

std::string_view
toString(ForwarderActionKind k)
{
  switch (k) {
    case ForwarderActionKind::sendData: return "send-data";
    case ForwarderActionKind::forwardInterest: return "forward-interest";
    case ForwarderActionKind::aggregate: return "aggregate";
    case ForwarderActionKind::noRoute: return "no-route";
    case ForwarderActionKind::dropUnsolicited: return "drop-unsolicited";
    case ForwarderActionKind::cacheInsert: return "cache-insert";
    case ForwarderActionKind::cacheEvict: return "cache-evict";
  }
  return "?";
}

// ---- Fib

void
Fib::insert(const Name& prefix, FaceId face)
{
  auto& hops = m_entries[prefix];
  if (std::find(hops.begin(), hops.end(), face) == hops.end())
    hops.push_back(face);
  m_maxPrefixLength = std::max(m_maxPrefixLength, prefix.size());
}

void
Fib::erase(const Name& prefix)
{
  m_entries.erase(prefix);
}

const std::vector<FaceId>*
Fib::findLongestPrefixMatch(const Name& name) const
{
  for (std::size_t len = std::min(name.size(), m_maxPrefixLength) + 1; len-- > 0;) {
    auto it = m_entries.find(name.getPrefix(len));
    if (it != m_entries.end() && !it->second.empty())
      return &it->second;
  }
  return nullptr;
}

// ---- Pit

PitEntry*
Pit::find(const ContentName& name, SimTime now)
{
  auto it = m_table.find(name);
  if (it == m_table.end())
    return nullptr;
  if (it->second.expiry <= now) {
    m_table.erase(it);
    return nullptr;
  }
  return &it->second;
}

PitEntry&
Pit::insert(const ContentName& name)
{
  return m_table[name];
}

void
Pit::erase(const ContentName& name)
{
  m_table.erase(name);
}

std::size_t
Pit::purgeExpired(SimTime now)
{
  return std::erase_if(m_table, [now] (auto& kv) {
    auto& recs = kv.second.inRecords;
    std::erase_if(recs, [now] (const PitInRecord& r) { return r.expiry <= now; });
    return recs.empty() || kv.second.expiry <= now;
  });
}

// ---- ContentStore

ContentStore::ContentStore(std::size_t capacity)
  : m_capacity(std::max<std::size_t>(capacity, 1))
{
}

DataPtr
ContentStore::find(const ContentName& name)
{
  auto it = m_index.find(name);
  if (it == m_index.end())
    return nullptr;
  m_lru.splice(m_lru.begin(), m_lru, it->second);
  return *it->second;
}

DataPtr
ContentStore::insert(DataPtr data)
{
  auto it = m_index.find(data->name);
  if (it != m_index.end()) {
    *it->second = std::move(data);
    m_lru.splice(m_lru.begin(), m_lru, it->second);
    return nullptr;
  }
  DataPtr evicted;
  if (m_lru.size() >= m_capacity) {
    evicted = m_lru.back();
    m_index.erase(evicted->name);
    m_lru.pop_back();
  }
  m_lru.push_front(std::move(data));
  m_index.emplace(m_lru.front()->name, m_lru.begin());
  return evicted;
}

// ---- Forwarder

FaceId
Forwarder::route(const Interest& interest, FaceId ingress) const
{
  const auto* hops = m_fib.findLongestPrefixMatch(interest.name.toName());
  if (hops != nullptr) {
    for (FaceId f : *hops)
      if (f != ingress)
        return f;
  }
  return INVALID_FACE;
}

std::vector<ForwarderAction>
Forwarder::onInterest(const Interest& interest, FaceId ingress, SimTime now)
{
  ++m_counters.nInInterests;
  const SimTime expiry = now + interest.lifetime;

  if (auto cached = m_cs.find(interest.name)) {
    ++m_counters.nCacheHits;
    return {{ForwarderActionKind::sendData, ingress, std::move(cached)}};
  }

  if (auto* entry = m_pit.find(interest.name, now)) {
    auto rec = std::find_if(entry->inRecords.begin(), entry->inRecords.end(),
                            [ingress] (const PitInRecord& r) { return r.face == ingress; });
    entry->expiry = std::max(entry->expiry, expiry);
    if (rec == entry->inRecords.end()) {
      entry->inRecords.push_back({ingress, expiry});
      ++m_counters.nAggregated;
      return {{ForwarderActionKind::aggregate, ingress, nullptr}};
    }
    // same downstream asking again: a retransmission, so it goes upstream again
    rec->expiry = std::max(rec->expiry, expiry);
    ++m_counters.nRetransmitted;
    if (FaceId egress = route(interest, ingress); egress != INVALID_FACE)
      return {{ForwarderActionKind::forwardInterest, egress, nullptr}};
    ++m_counters.nNoRoute;
    return {{ForwarderActionKind::noRoute, ingress, nullptr}};
  }

  const FaceId egress = route(interest, ingress);
  if (egress == INVALID_FACE) {
    ++m_counters.nNoRoute;
    return {{ForwarderActionKind::noRoute, ingress, nullptr}};
  }

  auto& entry = m_pit.insert(interest.name);
  entry.inRecords.assign(1, {ingress, expiry});
  entry.expiry = expiry;
  return {{ForwarderActionKind::forwardInterest, egress, nullptr}};
}

std::vector<ForwarderAction>
Forwarder::onData(const DataPtr& data, FaceId ingress, SimTime now)
{
  ++m_counters.nInData;
  auto* entry = m_pit.find(data->name, now);
  if (entry == nullptr) {
    ++m_counters.nUnsolicited;
    return {{ForwarderActionKind::dropUnsolicited, ingress, data}};
  }

  std::vector<ForwarderAction> actions;
  for (const auto& rec : entry->inRecords) {
    if (rec.expiry > now && rec.face != ingress)
      actions.push_back({ForwarderActionKind::sendData, rec.face, data});
  }
  m_pit.erase(data->name);

  if (auto evicted = m_cs.insert(data))
    actions.push_back({ForwarderActionKind::cacheEvict, INVALID_FACE, std::move(evicted)});
  actions.push_back({ForwarderActionKind::cacheInsert, INVALID_FACE, data});
  return actions;
}

bool
Forwarder::cancelInterest(const ContentName& name, FaceId face)
{
  auto* entry = m_pit.find(name, -1e300);
  if (entry == nullptr)
    return false;
  auto n = std::erase_if(entry->inRecords, [face] (const PitInRecord& r) { return r.face == face; });
  if (entry->inRecords.empty())
    m_pit.erase(name);
  if (n > 0)
    ++m_counters.nCancelled;
  return n > 0;
}

} // namespace srmca
