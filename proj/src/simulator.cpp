#include "srmca/simulator.hpp"

#include <fmt/format.h>

#include <fstream>

namespace srmca {

void
EventQueue::schedule(SimTime at, Handler fn)
{
  if (at < m_now)
    throw ContractViolation(fmt::format("event scheduled in the past ({} < {})", at, m_now));
  m_queue.push({at, m_seq++, std::move(fn)});
}

std::uint64_t
EventQueue::runUntil(SimTime until)
{
  std::uint64_t n = 0;
  while (!m_queue.empty() && m_queue.top().time <= until) {
    // pop first: the handler may schedule more events
    Entry e = std::move(const_cast<Entry&>(m_queue.top()));
    m_queue.pop();
    m_now = e.time;
    e.fn();
    ++n;
  }
  m_now = std::max(m_now, until);
  return n;
}

std::optional<SimTime>
Link::transmit(std::uint64_t bytes, SimTime now)
{
  if (!up)
    return std::nullopt;
  const SimTime start = std::max(now, nextFree);
  nextFree = start + static_cast<double>(bytes) * 8.0 / bandwidth * 1000.0;
  return nextFree + latency;
}

double
RunResult::pathLatency(const std::string& from, const std::string& to) const
{
  auto hop = [this] (const std::string& a, const std::string& b) {
    auto it = linkLatency.find({a, b});
    if (it == linkLatency.end())
      throw std::out_of_range("no link " + a + " -> " + b);
    return it->second;
  };
  auto homeOf = [this] (const std::string& n) { return n.starts_with("ue") ? config.homeOf(n) : n; };

  double total = 0;
  std::string cur = from;
  const std::string toHome = homeOf(to);
  if (cur.starts_with("ue")) {
    total += hop(cur, homeOf(cur));
    cur = homeOf(cur);
  }
  if (cur != toHome) {
    total += hop(cur, "router") + hop("router", toHome);
    cur = toHome;
  }
  if (to != cur)
    total += hop(cur, to);
  return total;
}

namespace {

constexpr FaceId UPLINK_FACE = 0;
constexpr FaceId CONSUMER_FACE = 1;

FaceId
producerFace(MediaType m)
{
  return 2 + static_cast<FaceId>(m);
}

enum class Role : std::uint8_t { agent, proxy, manager };

struct SyncMsg
{
  enum class Type : std::uint8_t { notify, registerAgent, deregisterAgent, membership } type;
  Role to = Role::proxy;
  bool fromManager = false;
  Notification n;
  std::string conf;
  std::string ue;
  std::string proxy;
  bool interested = false;
  bool joined = true;
};

struct Packet
{
  PacketKind kind = PacketKind::interest;
  int src = -1;
  int dest = -1;
  Interest interest;
  DataPtr data;
  std::shared_ptr<const SyncMsg> sync;
  std::uint32_t bytes = 0;
  std::shared_ptr<const std::string> label;
};

enum class NodeKind : std::uint8_t { ue, vser, router };

struct ProducerApp
{
  std::unique_ptr<Producer> producer;
  std::function<EncodedFrame(FrameIndex)> source;
  double frameInterval = 40.0;
  SimTime start = 0.0;
};

struct StreamApp
{
  std::unique_ptr<ConsumerStream> stream;
  bool ticking = false;
  std::string producerHome;
};

struct Node
{
  std::string id;
  NodeKind kind = NodeKind::router;
  int home = -1; ///< UE: VSER node
  std::unique_ptr<Forwarder> fwd;

  // UE
  bool joined = false;
  std::uint64_t generation = 0;
  std::map<MediaType, ProducerApp> producers;
  std::map<ProducerKey, StreamApp> streams;
  std::unique_ptr<SyncAgent> agent;

  // VSER
  std::unique_ptr<SyncProxy> proxy;
  std::map<int, FaceId> faceOf;  ///< neighbor (UE or remote VSER) -> face
  std::vector<int> neighborOf;   ///< face -> neighbor
};

class World
{
public:
  World(const ScenarioConfig& cfg, Trace& trace, RunResult& result);

  void
  run();

private:
  // topology
  int
  nodeIndex(const std::string& id) const
  {
    return m_index.at(id);
  }

  int
  nextHop(int cur, int dest) const;

  Link&
  link(int a, int b)
  {
    return m_links.at({a, b});
  }

  // transport
  void
  send(int from, Packet p);

  void
  arrive(int node, int prev, Packet p, std::uint64_t epoch, SimTime sent);

  void
  dispatch(int node, Packet& p);

  void
  sendSync(int from, int to, SyncMsg msg);

  // forwarding
  void
  sendOnFace(int node, FaceId face, PacketKind kind, const Interest* interest, const DataPtr& data,
             const std::shared_ptr<const std::string>& label);

  void
  applyForwarder(int node, const std::vector<ForwarderAction>& actions, const Interest* interest,
                 const std::shared_ptr<const std::string>& label);

  void
  interestIn(int node, const Interest& interest, FaceId face, const std::shared_ptr<const std::string>& label);

  void
  dataIn(int node, const DataPtr& data, FaceId face);

  // applications
  void
  handleSync(int node, const SyncMsg& msg);

  void
  applyProxy(int vser, const std::vector<SyncAction>& actions);

  void
  applyManager(const std::vector<SyncAction>& actions);

  void
  deliverNotification(int ue, const Notification& n);

  void
  applyConsumer(int ue, const ProducerKey& key, const std::vector<ConsumerAction>& actions);

  void
  scheduleTick(int ue, const ProducerKey& key, SimTime at, std::uint64_t generation);

  void
  consumerData(int ue, const DataPtr& data);

  void
  startProducer(int ue, MediaType media);

  void
  publishNext(int ue, MediaType media, FrameIndex index, std::uint64_t generation);

  void
  producerInterest(int ue, const Interest& interest, FaceId face);

  void
  applyProducer(int ue, MediaType media, const std::vector<ProducerAction>& actions);

  // scenario
  void
  scriptEvent(const ScriptEvent& ev);

  void
  purgeTimer();

  std::size_t
  csCapacity() const;

  const ScenarioConfig& m_cfg;
  Trace& m_trace;
  RunResult& m_result;
  EventQueue m_queue;
  std::vector<Node> m_nodes;
  std::map<std::string, int> m_index;
  std::map<std::pair<int, int>, Link> m_links;
  std::unique_ptr<SyncManager> m_manager;
  int m_managerNode = -1;
  int m_router = -1;
  double m_lifetime = 0.0;
  std::vector<EncodedFrame> m_videoTrace;
};

World::World(const ScenarioConfig& cfg, Trace& trace, RunResult& result)
  : m_cfg(cfg)
  , m_trace(trace)
  , m_result(result)
  , m_lifetime(interestLifetime(cfg))
{
  if (!cfg.media.videoTrace.empty()) {
    std::ifstream in(cfg.media.videoTrace);
    if (!in)
      throw std::runtime_error("cannot read video trace '" + cfg.media.videoTrace + "'");
    m_videoTrace = readFrameTrace(in, 1000.0 / cfg.producer.fps);
    if (m_videoTrace.empty())
      throw std::runtime_error("video trace '" + cfg.media.videoTrace + "' is empty");
  }

  auto add = [this] (std::string id, NodeKind kind) {
    Node n;
    n.id = id;
    n.kind = kind;
    m_index[id] = static_cast<int>(m_nodes.size());
    m_nodes.push_back(std::move(n));
    return static_cast<int>(m_nodes.size()) - 1;
  };

  m_router = add("router", NodeKind::router);
  const auto vsers = cfg.vserIds();
  for (const auto& v : vsers) {
    int i = add(v, NodeKind::vser);
    m_nodes[i].fwd = std::make_unique<Forwarder>(csCapacity());
    m_nodes[i].proxy = std::make_unique<SyncProxy>(v, std::set<std::string>{cfg.topology.session},
                                                   cfg.topology.historyDepth);
  }
  const auto ues = cfg.ueIds();
  for (const auto& u : ues) {
    int i = add(u, NodeKind::ue);
    m_nodes[i].home = nodeIndex(cfg.homeOf(u));
    m_nodes[i].fwd = std::make_unique<Forwarder>(csCapacity());
    m_nodes[i].agent = std::make_unique<SyncAgent>(u, cfg.homeOf(u));
  }

  m_manager = std::make_unique<SyncManager>(cfg.topology.historyDepth);
  for (const auto& v : vsers)
    m_manager->addProxy(v);
  m_managerNode = nodeIndex(cfg.topology.manager);

  auto connect = [this, &cfg] (int a, int b, double latency) {
    Link l;
    l.latency = latency;
    l.bandwidth = cfg.links.bandwidth;
    m_links[{a, b}] = l;
    m_result.linkLatency[{m_nodes[a].id, m_nodes[b].id}] = latency;
  };

  // latencies drawn once per link direction, independent of event order
  FrameHash draw(cfg.seed, 0x11e4);
  const auto& L = cfg.links;
  for (std::size_t k = 0; k < ues.size(); ++k) {
    int ue = nodeIndex(ues[k]);
    int v = m_nodes[ue].home;
    const auto idx = static_cast<FrameIndex>(k);
    connect(ue, v, L.ueUpMin + (L.ueUpMax - L.ueUpMin) * draw.unit(idx, 1));
    connect(v, ue, L.ueDownMin + (L.ueDownMax - L.ueDownMin) * draw.unit(idx, 2));
  }
  for (const auto& vs : vsers) {
    int v = nodeIndex(vs);
    connect(v, m_router, L.coreLatency);
    connect(m_router, v, L.coreLatency);
  }

  // static FIB: producer prefixes per VSER, default route on UEs
  const Name session({cfg.topology.session});
  for (const auto& vs : vsers) {
    int v = nodeIndex(vs);
    Node& node = m_nodes[v];
    auto addFace = [&node] (int neighbor) {
      FaceId f = static_cast<FaceId>(node.neighborOf.size());
      node.neighborOf.push_back(neighbor);
      node.faceOf[neighbor] = f;
      return f;
    };
    for (const auto& u : ues) {
      int ue = nodeIndex(u);
      if (m_nodes[ue].home != v)
        continue;
      FaceId f = addFace(ue);
      node.fwd->fib().insert(Name({vs, cfg.topology.session, u}), f);
    }
    for (const auto& other : vsers) {
      if (other == vs)
        continue;
      FaceId f = addFace(nodeIndex(other));
      node.fwd->fib().insert(Name({other}), f);
    }
  }
  for (const auto& u : ues) {
    Node& node = m_nodes[nodeIndex(u)];
    node.fwd->fib().insert(Name(), UPLINK_FACE);
    const std::string home = cfg.homeOf(u);
    for (MediaType m : {MediaType::audio, MediaType::video, MediaType::text})
      node.fwd->fib().insert(Name({home, cfg.topology.session, u, std::string(toString(m))}), producerFace(m));
  }
}

std::size_t
World::csCapacity() const
{
  const auto& p = m_cfg.producer;
  const auto& vm = m_cfg.media.videoModel;
  const std::size_t keyChunks = (vm.key.hi + p.chunkSize - 1) / p.chunkSize;
  const std::size_t deltaChunks = (std::max(vm.delta.hi, vm.oversize.hi) + p.chunkSize - 1) / p.chunkSize;
  const std::size_t perStream = keyChunks + (p.gopSize - 1) * deltaChunks +
                                producerConfigFor(m_cfg, MediaType::audio).gopSize + 1;
  return std::max<std::size_t>(64, 2 * perStream * m_cfg.topology.ues);
}

int
World::nextHop(int cur, int dest) const
{
  const Node& c = m_nodes[cur];
  const Node& d = m_nodes[dest];
  switch (c.kind) {
    case NodeKind::ue:
      return c.home;
    case NodeKind::vser:
      if (d.kind == NodeKind::ue && d.home == cur)
        return dest;
      return m_router;
    case NodeKind::router:
      return d.kind == NodeKind::ue ? d.home : dest;
  }
  return dest;
}

void
World::send(int from, Packet p)
{
  const int next = nextHop(from, p.dest);
  Link& l = link(from, next);
  const SimTime now = m_queue.now();
  auto arrival = l.transmit(p.bytes, now);
  if (!arrival) {
    m_trace.packet(now, now, m_nodes[from].id, m_nodes[next].id, p.kind, p.bytes, true, *p.label);
    return;
  }
  const std::uint64_t epoch = l.epoch;
  m_queue.schedule(*arrival, [this, next, from, p = std::move(p), epoch, now] () mutable {
    arrive(next, from, std::move(p), epoch, now);
  });
}

void
World::arrive(int node, int prev, Packet p, std::uint64_t epoch, SimTime sent)
{
  const Link& l = link(prev, node);
  const bool lost = !l.up || l.epoch != epoch;
  m_trace.packet(sent, m_queue.now(), m_nodes[prev].id, m_nodes[node].id, p.kind, p.bytes, lost, *p.label);
  if (lost)
    return;
  if (p.dest != node) {
    send(node, std::move(p));
    return;
  }
  dispatch(node, p);
}

void
World::dispatch(int node, Packet& p)
{
  Node& n = m_nodes[node];
  if (p.kind == PacketKind::notification) {
    handleSync(node, *p.sync);
    return;
  }
  FaceId face = UPLINK_FACE;
  if (n.kind == NodeKind::vser)
    face = n.faceOf.at(p.src);
  if (p.kind == PacketKind::interest)
    interestIn(node, p.interest, face, p.label);
  else
    dataIn(node, p.data, face);
}

void
World::sendSync(int from, int to, SyncMsg msg)
{
  auto shared = std::make_shared<const SyncMsg>(std::move(msg));
  if (from == to) {
    m_queue.schedule(m_queue.now(), [this, to, shared] { handleSync(to, *shared); });
    return;
  }
  Packet p;
  p.kind = PacketKind::notification;
  p.src = from;
  p.dest = to;
  p.sync = shared;
  p.bytes = m_cfg.topology.notificationBytes;
  static const auto label = std::make_shared<const std::string>("sync");
  p.label = label;
  send(from, std::move(p));
}

// ---- forwarding

void
World::sendOnFace(int node, FaceId face, PacketKind kind, const Interest* interest, const DataPtr& data,
                  const std::shared_ptr<const std::string>& label)
{
  Node& n = m_nodes[node];
  if (n.kind == NodeKind::ue && face != UPLINK_FACE) {
    // local application faces: zero-delay hand-off
    if (kind == PacketKind::data && face == CONSUMER_FACE) {
      m_queue.schedule(m_queue.now(), [this, node, data] { consumerData(node, data); });
    }
    else if (kind == PacketKind::interest && face >= producerFace(MediaType::audio)) {
      Interest copy = *interest;
      m_queue.schedule(m_queue.now(), [this, node, copy, face] { producerInterest(node, copy, face); });
    }
    return;
  }

  Packet p;
  p.kind = kind;
  p.src = node;
  p.dest = n.kind == NodeKind::ue ? n.home : n.neighborOf.at(face);
  p.label = label;
  if (kind == PacketKind::interest) {
    p.interest = *interest;
    p.bytes = static_cast<std::uint32_t>(label->size()) + m_cfg.topology.interestOverhead;
  }
  else {
    p.data = data;
    p.bytes = data->payloadSize + static_cast<std::uint32_t>(label->size()) + m_cfg.topology.dataOverhead;
  }
  send(node, std::move(p));
}

void
World::applyForwarder(int node, const std::vector<ForwarderAction>& actions, const Interest* interest,
                      const std::shared_ptr<const std::string>& label)
{
  for (const auto& a : actions) {
    switch (a.kind) {
      case ForwarderActionKind::sendData: {
        auto l = label ? label : std::make_shared<const std::string>(a.data->name.toUri());
        sendOnFace(node, a.face, PacketKind::data, nullptr, a.data, l);
        break;
      }
      case ForwarderActionKind::forwardInterest:
        sendOnFace(node, a.face, PacketKind::interest, interest, nullptr, label);
        break;
      default:
        break;
    }
  }
}

void
World::interestIn(int node, const Interest& interest, FaceId face, const std::shared_ptr<const std::string>& label)
{
  auto actions = m_nodes[node].fwd->onInterest(interest, face, m_queue.now());
  applyForwarder(node, actions, &interest, label);
}

void
World::dataIn(int node, const DataPtr& data, FaceId face)
{
  auto actions = m_nodes[node].fwd->onData(data, face, m_queue.now());
  applyForwarder(node, actions, nullptr, nullptr);
}

// ---- sync framework

void
World::handleSync(int node, const SyncMsg& msg)
{
  Node& n = m_nodes[node];
  const SimTime now = m_queue.now();
  switch (msg.to) {
    case Role::agent:
      deliverNotification(node, msg.n);
      break;

    case Role::proxy: {
      switch (msg.type) {
        case SyncMsg::Type::notify:
          m_trace.syncEvent(now, n.id, msg.fromManager ? "proxy-from-manager" : "proxy-from-agent", msg.n);
          applyProxy(node, msg.fromManager ? n.proxy->onManagerNotify(msg.n) : n.proxy->onAgentNotify(msg.n));
          break;
        case SyncMsg::Type::registerAgent:
          try {
            applyProxy(node, n.proxy->registerAgent(msg.conf, msg.ue, msg.interested));
          }
          catch (const SessionNotProvisionedError&) {
            m_trace.syncEvent(now, n.id, "register-rejected", Notification{0, {msg.conf, msg.ue}});
          }
          break;
        case SyncMsg::Type::deregisterAgent:
          applyProxy(node, n.proxy->deregisterAgent(msg.conf, msg.ue));
          break;
        case SyncMsg::Type::membership:
          break;
      }
      break;
    }

    case Role::manager:
      if (msg.type == SyncMsg::Type::membership) {
        applyManager(m_manager->onMembership(msg.proxy, msg.conf, msg.joined, msg.interested));
      }
      else {
        m_trace.syncEvent(now, "manager", "relay", msg.n);
        applyManager(m_manager->relay(msg.n, msg.proxy));
      }
      break;
  }
}

void
World::applyProxy(int vser, const std::vector<SyncAction>& actions)
{
  const Node& n = m_nodes[vser];
  for (const auto& a : actions) {
    switch (a.kind) {
      case SyncActionKind::toManager: {
        SyncMsg m{SyncMsg::Type::notify, Role::manager};
        m.n = a.notification;
        m.proxy = n.id;
        sendSync(vser, m_managerNode, std::move(m));
        break;
      }
      case SyncActionKind::toAgent: {
        SyncMsg m{SyncMsg::Type::notify, Role::agent};
        m.n = a.notification;
        sendSync(vser, nodeIndex(a.target), std::move(m));
        break;
      }
      case SyncActionKind::membership: {
        SyncMsg m{SyncMsg::Type::membership, Role::manager};
        m.proxy = n.id;
        m.conf = a.conf;
        m.joined = a.joined;
        m.interested = a.interested;
        sendSync(vser, m_managerNode, std::move(m));
        break;
      }
      case SyncActionKind::controllerEvent:
        m_trace.syncEvent(m_queue.now(), n.id, a.joined ? "controller-join" : "controller-leave",
                          Notification{0, {a.conf, a.target}});
        break;
      case SyncActionKind::dropStale:
        m_trace.syncEvent(m_queue.now(), n.id, "drop-stale", a.notification);
        break;
      case SyncActionKind::toProxy:
        break;
    }
  }
}

void
World::applyManager(const std::vector<SyncAction>& actions)
{
  for (const auto& a : actions) {
    if (a.kind == SyncActionKind::toProxy) {
      SyncMsg m{SyncMsg::Type::notify, Role::proxy};
      m.fromManager = true;
      m.n = a.notification;
      sendSync(m_managerNode, nodeIndex(a.target), std::move(m));
    }
    else if (a.kind == SyncActionKind::dropStale) {
      m_trace.syncEvent(m_queue.now(), "manager", "drop-stale", a.notification);
    }
  }
}

// ---- consumer side

void
World::deliverNotification(int ue, const Notification& n)
{
  Node& node = m_nodes[ue];
  const SimTime now = m_queue.now();
  if (!node.joined)
    return;
  if (!node.agent->accept(n)) {
    m_trace.syncEvent(now, node.id, "agent-drop-stale", n);
    return;
  }
  m_trace.syncEvent(now, node.id, "agent-deliver", n);

  const ProducerKey key{n.fingerprint.ue, n.fingerprint.media};
  if (!m_cfg.isConsumer(node.id) || key.ue == node.id)
    return;
  const MediaType m = key.media;
  if ((m == MediaType::video && !m_cfg.media.video) || (m == MediaType::audio && !m_cfg.media.audio) ||
      (m == MediaType::text && !m_cfg.media.text))
    return;

  m_trace.notificationDelivered({now, node.id, key, n.fingerprint.anchor});
  auto [it, inserted] = node.streams.try_emplace(key);
  if (inserted) {
    it->second.stream = std::make_unique<ConsumerStream>(consumerConfigFor(m_cfg, m));
    it->second.producerHome = m_cfg.homeOf(key.ue);
  }
  auto actions = it->second.stream->onNotification(n, now);
  applyConsumer(ue, key, actions);
  if (!it->second.ticking && it->second.stream->started()) {
    it->second.ticking = true;
    scheduleTick(ue, key, now + it->second.stream->config().frameInterval(), node.generation);
  }
}

void
World::scheduleTick(int ue, const ProducerKey& key, SimTime at, std::uint64_t generation)
{
  m_queue.schedule(at, [this, ue, key, generation] {
    Node& node = m_nodes[ue];
    if (node.generation != generation)
      return;
    auto it = node.streams.find(key);
    if (it == node.streams.end())
      return;
    auto actions = it->second.stream->tick(m_queue.now());
    applyConsumer(ue, key, actions);
    scheduleTick(ue, key, m_queue.now() + it->second.stream->config().frameInterval(), generation);
  });
}

void
World::applyConsumer(int ue, const ProducerKey& key, const std::vector<ConsumerAction>& actions)
{
  Node& node = m_nodes[ue];
  const SimTime now = m_queue.now();
  const std::string label = producerLabel(key);
  const auto& stream = node.streams.at(key);

  auto nameOf = [&] (FrameIndex frame, std::uint32_t chunk) {
    ContentName c;
    c.csr = stream.producerHome;
    c.conf = m_cfg.topology.session;
    c.ue = key.ue;
    c.media = key.media;
    c.frame = static_cast<std::uint64_t>(frame);
    c.chunk = chunk;
    return c;
  };

  for (const auto& a : actions) {
    switch (a.kind) {
      case ConsumerActionKind::interest:
      case ConsumerActionKind::repair: {
        auto& rec = m_trace.frame(node.id, key, a.frame);
        if (rec.requestedChunks == 0)
          rec.requested = now;
        rec.requestedChunks = std::max(rec.requestedChunks, a.chunk + 1);
        if (a.kind == ConsumerActionKind::repair)
          m_trace.consumerEvent(now, node.id, label, "repair", a.frame, a.chunk);
        Interest i;
        i.name = nameOf(a.frame, a.chunk);
        i.lifetime = m_lifetime;
        i.issueTime = now;
        i.origin = static_cast<NodeId>(ue);
        interestIn(ue, i, CONSUMER_FACE, std::make_shared<const std::string>(i.name.toUri()));
        break;
      }
      case ConsumerActionKind::cancel:
        node.fwd->cancelInterest(nameOf(a.frame, a.chunk), CONSUMER_FACE);
        m_trace.consumerEvent(now, node.id, label, "cancel", a.frame, a.chunk);
        break;
      case ConsumerActionKind::schedule: {
        auto& rec = m_trace.frame(node.id, key, a.frame);
        rec.tau = a.time;
        m_trace.consumerEvent(now, node.id, label, "schedule", a.frame, a.time);
        break;
      }
      case ConsumerActionKind::complete: {
        if (auto* rec = m_trace.findFrame(node.id, key, a.frame)) {
          rec->complete = a.time;
          m_trace.consumerEvent(now, node.id, label, "frame-complete", a.frame,
                                rec->generated >= 0 ? a.time - rec->generated : -1.0);
        }
        break;
      }
      case ConsumerActionKind::jumpLag:
      case ConsumerActionKind::jumpFail:
      case ConsumerActionKind::restart:
        m_trace.consumerEvent(now, node.id, label, toString(a.kind), a.frame, a.time);
        break;
    }
  }
}

void
World::consumerData(int ue, const DataPtr& data)
{
  Node& node = m_nodes[ue];
  const ProducerKey key{data->name.ue, data->name.media};
  auto it = node.streams.find(key);
  if (!node.joined || it == node.streams.end())
    return;
  const SimTime now = m_queue.now();
  if (auto* rec = m_trace.findFrame(node.id, key, static_cast<FrameIndex>(data->name.frame))) {
    if (rec->firstChunk < 0) {
      rec->firstChunk = now;
      rec->generated = data->generationTime;
    }
    if (rec->totalChunks == 0)
      rec->totalChunks = data->meta.totalChunks;
  }
  auto actions = it->second.stream->onData(*data, now);
  applyConsumer(ue, key, actions);
}

// ---- producer side

void
World::startProducer(int ue, MediaType media)
{
  Node& node = m_nodes[ue];
  ProducerApp app;
  ContentName base;
  base.csr = m_cfg.homeOf(node.id);
  base.conf = m_cfg.topology.session;
  base.ue = node.id;
  base.media = media;
  const ProducerConfig pc = producerConfigFor(m_cfg, media);
  app.producer = std::make_unique<Producer>(pc, base);
  app.frameInterval = pc.frameInterval();
  app.start = m_queue.now();

  const std::uint64_t stream = static_cast<std::uint64_t>(ue) * 8 + static_cast<std::uint64_t>(media);
  if (media == MediaType::video) {
    if (!m_videoTrace.empty()) {
      auto frames = m_videoTrace;
      const double tf = pc.frameInterval();
      const std::uint32_t gop = pc.gopSize;
      app.source = [frames, tf, gop] (FrameIndex i) {
        EncodedFrame f = frames[static_cast<std::size_t>(i) % frames.size()];
        f.index = i;
        f.type = i % gop == 0 ? FrameType::key : FrameType::delta;
        f.mediaTimestamp = i * tf;
        return f;
      };
    }
    else {
      VideoModelConfig vm = m_cfg.media.videoModel;
      vm.fps = pc.fps;
      vm.gopSize = pc.gopSize;
      auto model = std::make_shared<VideoModel>(vm, m_cfg.seed, stream);
      app.source = [model] (FrameIndex i) { return model->frame(i); };
    }
  }
  else if (media == MediaType::audio) {
    auto model = std::make_shared<AudioModel>(m_cfg.media.audioBitrate, m_cfg.media.audioInterval);
    app.source = [model] (FrameIndex i) { return model->frame(i); };
  }
  else {
    auto model = std::make_shared<TextModel>(m_cfg.media.textInterval, m_cfg.media.textSize, m_cfg.seed, stream);
    app.source = [model] (FrameIndex i) { return model->frame(i); };
  }
  node.producers[media] = std::move(app);
  publishNext(ue, media, 0, node.generation);
}

void
World::publishNext(int ue, MediaType media, FrameIndex index, std::uint64_t generation)
{
  Node& node = m_nodes[ue];
  if (node.generation != generation)
    return;
  auto it = node.producers.find(media);
  if (it == node.producers.end())
    return;
  ProducerApp& app = it->second;
  auto actions = app.producer->publish(app.source(index), m_queue.now());
  m_trace.lastPublished({node.id, media}, index, m_queue.now());
  applyProducer(ue, media, actions);

  const SimTime next = app.start + static_cast<double>(index + 1) * app.frameInterval;
  m_queue.schedule(next, [this, ue, media, index, generation] { publishNext(ue, media, index + 1, generation); });
}

void
World::producerInterest(int ue, const Interest& interest, FaceId face)
{
  Node& node = m_nodes[ue];
  auto it = node.producers.find(interest.name.media);
  if (!node.joined || it == node.producers.end())
    return;
  applyProducer(ue, interest.name.media, it->second.producer->processInterest(interest, face, m_queue.now()));
}

void
World::applyProducer(int ue, MediaType media, const std::vector<ProducerAction>& actions)
{
  Node& node = m_nodes[ue];
  const SimTime now = m_queue.now();
  const std::string label = producerLabel({node.id, media});
  for (const auto& a : actions) {
    switch (a.kind) {
      case ProducerActionKind::sendData:
        m_trace.producerEvent(now, label, "satisfy", a.frame, a.chunk, a.bytes);
        dataIn(ue, a.data, a.face);
        break;
      case ProducerActionKind::notify: {
        m_trace.producerEvent(now, label, "notify", a.frame, 0, a.notification.index);
        SyncMsg m{SyncMsg::Type::notify, Role::proxy};
        m.n = a.notification;
        sendSync(ue, node.home, std::move(m));
        break;
      }
      case ProducerActionKind::pend:
        break;
      default:
        m_trace.producerEvent(now, label, toString(a.kind), a.frame, a.chunk, a.bytes);
        break;
    }
  }
}

// ---- scenario

void
World::scriptEvent(const ScriptEvent& ev)
{
  const int ue = nodeIndex(ev.ue);
  Node& node = m_nodes[ue];
  const SimTime now = m_queue.now();

  switch (ev.kind) {
    case ScriptEventKind::join: {
      if (node.joined) {
        m_trace.scenarioEvent(now, "join-noop", ev.ue);
        return;
      }
      m_trace.scenarioEvent(now, "join", ev.ue);
      node.joined = true;
      ++node.generation;
      node.agent = std::make_unique<SyncAgent>(node.id, m_cfg.homeOf(node.id));
      SyncMsg m{SyncMsg::Type::registerAgent, Role::proxy};
      m.conf = ev.conf.empty() ? m_cfg.topology.session : ev.conf;
      m.ue = node.id;
      m.interested = m_cfg.isConsumer(node.id);
      sendSync(ue, node.home, std::move(m));
      if (m_cfg.isProducer(node.id)) {
        if (m_cfg.media.video)
          startProducer(ue, MediaType::video);
        if (m_cfg.media.audio)
          startProducer(ue, MediaType::audio);
        if (m_cfg.media.text)
          startProducer(ue, MediaType::text);
      }
      break;
    }
    case ScriptEventKind::leave: {
      if (!node.joined) {
        m_trace.scenarioEvent(now, "leave-noop", ev.ue);
        return;
      }
      m_trace.scenarioEvent(now, "leave", ev.ue);
      node.joined = false;
      ++node.generation;
      for (const auto& [media, app] : node.producers)
        m_result.producers[producerLabel({node.id, media})] = app.producer->counters();
      node.producers.clear();
      node.streams.clear();
      SyncMsg m{SyncMsg::Type::deregisterAgent, Role::proxy};
      m.conf = m_cfg.topology.session;
      m.ue = node.id;
      sendSync(ue, node.home, std::move(m));
      break;
    }
    case ScriptEventKind::linkDown:
      m_trace.scenarioEvent(now, "link_down", ev.ue);
      for (auto key : {std::pair{ue, node.home}, std::pair{node.home, ue}}) {
        Link& l = m_links.at(key);
        l.up = false;
        ++l.epoch;
      }
      break;
    case ScriptEventKind::linkUp: {
      m_trace.scenarioEvent(now, "link_up", ev.ue);
      for (auto key : {std::pair{ue, node.home}, std::pair{node.home, ue}})
        m_links.at(key).up = true;
      // the proxy sees the access link return and replays its history
      const Node& vser = m_nodes[node.home];
      const auto& members = vser.proxy->members(m_cfg.topology.session);
      if (auto it = members.find(node.id); it != members.end() && it->second)
        applyProxy(node.home, vser.proxy->resync(m_cfg.topology.session, node.id));
      break;
    }
  }
}

void
World::purgeTimer()
{
  for (auto& n : m_nodes)
    if (n.fwd)
      n.fwd->purgeExpired(m_queue.now());
  m_queue.schedule(m_queue.now() + 1000.0, [this] { purgeTimer(); });
}

void
World::run()
{
  for (const auto& ev : m_cfg.script)
    m_queue.schedule(ev.time, [this, ev] { scriptEvent(ev); });
  m_queue.schedule(1000.0, [this] { purgeTimer(); });

  m_result.events = m_queue.runUntil(m_cfg.duration);

  for (const auto& n : m_nodes) {
    if (n.fwd)
      m_result.forwarders[n.id] = n.fwd->counters();
    for (const auto& [media, app] : n.producers)
      m_result.producers[producerLabel({n.id, media})] = app.producer->counters();
    for (const auto& [key, s] : n.streams)
      m_result.consumers[n.id + ">" + producerLabel(key)] = s.stream->counters();
  }
}

} // namespace

RunResult
runScenario(const ScenarioConfig& cfg, const std::string& csvDir)
{
  if (auto problems = validate(cfg); !problems.empty())
    throw ConfigError(std::move(problems));

  RunResult result;
  result.config = cfg;
  result.trace = std::make_unique<Trace>(csvDir);
  {
    World world(result.config, *result.trace, result);
    world.run();
  }
  result.trace->finish();
  return result;
}

} // namespace srmca
