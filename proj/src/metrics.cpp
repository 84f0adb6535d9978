#include "srmca/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace srmca {

namespace {

void
checkInputs(const BandwidthModelInputs& in)
{
  if (in.kappaI > in.kappaU)
    throw InvalidInputError(fmt::format("clients at VSER ({}) exceed session clients ({})", in.kappaI, in.kappaU));
  if (in.nVser == 0 || in.kappaU == 0)
    throw InvalidInputError("need at least one VSER and one client");
  if (in.wI < 0 || in.wD < 0)
    throw InvalidInputError("stream rates must be non-negative");
}

double
fanout(const BandwidthModelInputs& in)
{
  // each local client talks to the other kappa_u - 1 clients, and each remote VSER adds one aggregated stream
  return static_cast<double>(in.kappaU) + static_cast<double>(in.nVser) - 2.0;
}

} // namespace

double
predictBandwidthDl(const BandwidthModelInputs& in)
{
  checkInputs(in);
  return in.wI * in.kappaI * fanout(in) + in.wD * in.kappaI;
}

double
predictBandwidthUl(const BandwidthModelInputs& in)
{
  checkInputs(in);
  return in.wD * in.kappaI * fanout(in) + in.wI * in.kappaI;
}

LatencyBudget
LatencyBudget::forMedia(const ScenarioConfig& cfg, MediaType media)
{
  const ConsumerConfig cc = consumerConfigFor(cfg, media);
  return {cc.rttEstimate, cc.dejitter, cc.encodeDelay, cc.decodeDelay, cc.e2eTarget};
}

double
transferBound(double rtt, bool underFetched)
{
  return rtt * (0.5 + (underFetched ? 1.0 : 0.0));
}

LatencyDecomposition
oneWayLatencyBound(const LatencyBudget& budget, bool underFetched)
{
  LatencyDecomposition d;
  d.transfer = transferBound(budget.rtt, underFetched);
  d.dejitter = budget.dejitter;
  d.codec = budget.codec();
  d.total = d.transfer + d.dejitter + d.codec;
  d.bound = d.total;
  d.pass = d.bound <= budget.e2e;
  return d;
}

LatencyDecomposition
oneWayLatencyCheck(const FrameRecord& frame, const LatencyBudget& budget, std::uint32_t estimatedChunks)
{
  if (frame.complete < 0 || frame.generated < 0)
    throw NotApplicableError(fmt::format("frame {} did not complete", frame.frame));
  LatencyDecomposition d = oneWayLatencyBound(budget, frame.totalChunks > estimatedChunks);
  d.transfer = frame.complete - frame.generated;
  d.total = d.transfer + d.dejitter + d.codec;
  return d;
}

DeadlineCheck
playoutDeadlineCheck(const FrameRecord& frame, FrameIndex anchor, SimTime tNotify, const ConsumerConfig& cc,
                     std::uint32_t interestBufferFrames, double rtt)
{
  DeadlineCheck c;
  c.playout = frame.tau;
  c.prefetch = prefetchDelay(cc.theta, interestBufferFrames, cc.fps);
  c.lead = std::min(c.prefetch, static_cast<double>(frame.frame - anchor) * cc.frameInterval());
  c.oneway = transferBound(rtt, frame.totalChunks > estimateChunks(cc, frame.frame));
  c.tNotify = tNotify;
  c.pass = playoutDeadlineHolds(c.playout, c.lead, c.oneway, c.tNotify);
  return c;
}

double
StreamQuality::percentile(double p) const
{
  if (latencies.empty())
    return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v;
  v.reserve(latencies.size());
  for (const auto& [k, l] : latencies)
    v.push_back(l);
  std::sort(v.begin(), v.end());
  // nearest rank
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

namespace {

std::map<FrameIndex, SimTime>
anchorsOf(const Trace& trace, const std::string& consumer, const ProducerKey& producer)
{
  std::map<FrameIndex, SimTime> out;
  for (const auto& d : trace.notifications())
    if (d.consumer == consumer && d.producer == producer)
      out.try_emplace(d.anchor, d.time);
  return out;
}

/// Intervals during which the UE was joined.
std::vector<Window>
membership(const Trace& trace, const std::string& ue, SimTime end)
{
  std::vector<Window> out;
  SimTime since = -1.0;
  for (const auto& m : trace.marks()) {
    if (m.ue != ue)
      continue;
    if (m.kind == "join" && since < 0)
      since = m.time;
    else if (m.kind == "leave" && since >= 0) {
      out.push_back({since, m.time});
      since = -1.0;
    }
  }
  if (since >= 0)
    out.push_back({since, end});
  return out;
}

} // namespace

StreamQuality
computeQuality(const RunResult& run, const std::string& consumer, const ProducerKey& producer)
{
  StreamQuality q;
  q.consumer = consumer;
  q.producer = producer;

  const Trace& trace = *run.trace;
  auto pub = trace.published().find(producer);
  if (pub == trace.published().end())
    return q;
  const FrameIndex lastPublished = pub->second.first;

  const ConsumerConfig cc = consumerConfigFor(run.config, producer.media);
  const LatencyBudget budget = LatencyBudget::forMedia(run.config, producer.media);
  const std::uint32_t nI = producerConfigFor(run.config, producer.media).interestBufferFrames;
  const auto anchors = anchorsOf(trace, consumer, producer);
  const SimTime end = run.config.duration;
  const auto member = membership(trace, consumer, end);
  auto counted = [&] (const FrameRecord& r) {
    const double deadline = r.tau - budget.dec;
    return std::any_of(member.begin(), member.end(),
                       [deadline] (const Window& w) { return deadline >= w.from && deadline <= w.to; });
  };

  const auto& frames = trace.frames();
  auto lo = frames.lower_bound({consumer, producer, std::numeric_limits<FrameIndex>::min()});
  auto hi = frames.upper_bound({consumer, producer, std::numeric_limits<FrameIndex>::max()});

  std::optional<FrameIndex> first;
  FrameIndex last = 0;
  for (auto it = lo; it != hi; ++it) {
    const FrameRecord& r = it->second;
    if (r.tau <= 0 || r.frame > lastPublished || !counted(r))
      continue;
    if (!first)
      first = r.frame;
    last = r.frame;
  }
  if (!first)
    return q;

  for (FrameIndex k = *first; k <= last; ++k) {
    auto it = frames.find({consumer, producer, k});
    const bool scheduled = it != frames.end() && it->second.tau > 0;
    if (scheduled && !counted(it->second))
      continue;
    ++q.total;
    if (!scheduled) {
      ++q.lost;
      continue;
    }
    const FrameRecord& r = it->second;

    if (auto a = anchors.upper_bound(k); a != anchors.begin()) {
      --a;
      if (!playoutDeadlineCheck(r, a->first, a->second, cc, nI, budget.rtt).pass)
        ++q.deadlineMisses;
    }

    if (r.complete < 0) {
      ++q.lost;
      continue;
    }
    if (r.complete <= r.tau - budget.dec) {
      ++q.usable;
      q.usableFrames.insert(k);
    }
    else {
      ++q.late;
    }
    if (r.generated >= 0) {
      const double oneWay = r.complete - r.generated + budget.dejitter + budget.codec();
      q.latencies.emplace_back(k, oneWay);
      if (oneWay <= budget.e2e)
        ++q.withinBudget;
    }
  }
  return q;
}

std::vector<StreamQuality>
computeQuality(const RunResult& run)
{
  std::set<std::pair<std::string, ProducerKey>> streams;
  for (const auto& [key, r] : run.trace->frames())
    streams.emplace(r.consumer, r.producer);
  std::vector<StreamQuality> out;
  for (const auto& [c, p] : streams)
    out.push_back(computeQuality(run, c, p));
  return out;
}

double
notificationOverhead(const Trace& trace)
{
  const auto& t = trace.totalBytes();
  const double all = static_cast<double>(t[0] + t[1] + t[2]);
  return all == 0 ? 0.0 : static_cast<double>(t[static_cast<std::size_t>(PacketKind::notification)]) / all;
}

Window
steadyStateWindow(const ScenarioConfig& cfg)
{
  double lastJoin = 0.0;
  for (const auto& ev : cfg.script)
    if (ev.kind == ScriptEventKind::join)
      lastJoin = std::max(lastJoin, ev.time);
  const ProducerConfig pc = producerConfigFor(cfg, MediaType::video);
  const double gop = pc.gopSize * pc.frameInterval();
  const double warm = pc.theta + pc.interestBufferFrames * pc.frameInterval();

  Window w;
  w.from = std::ceil((lastJoin + warm) / gop) * gop + gop / 2;
  const double gops = std::floor((cfg.duration - 1000.0 - w.from) / gop);
  w.to = gops >= 1 ? w.from + gops * gop : w.from;
  return w;
}

BandwidthReport
bandwidthReport(const RunResult& run)
{
  const auto& cfg = run.config;
  const auto& nodes = run.trace->nodeBytes();
  BandwidthReport rep;
  rep.window = steadyStateWindow(cfg);
  const double secs = rep.window.seconds();
  if (secs <= 0)
    return rep;

  auto bits = [&] (const ByteBins& b, PacketKind k) {
    return static_cast<double>(b.sum(rep.window.from, rep.window.to, k, Trace::BIN_MS)) * 8.0 / secs;
  };
  static const ByteBins empty;
  auto node = [&] (const std::string& id) -> const NodeBytes* {
    auto it = nodes.find(id);
    return it == nodes.end() ? nullptr : &it->second;
  };

  // clients joined throughout the window
  std::map<std::string, bool> member;
  for (const auto& ev : cfg.script) {
    if (ev.time > rep.window.to)
      continue;
    if (ev.kind == ScriptEventKind::join)
      member[ev.ue] = true;
    else if (ev.kind == ScriptEventKind::leave)
      member[ev.ue] = false;
  }
  std::vector<std::string> clients;
  for (const auto& [ue, m] : member)
    if (m)
      clients.push_back(ue);
  rep.kappaU = static_cast<std::uint32_t>(clients.size());
  if (clients.empty())
    return rep;

  double interestOut = 0.0;
  double dataOut = 0.0;
  for (const auto& ue : clients) {
    const NodeBytes* n = node(ue);
    interestOut += bits(n ? n->out : empty, PacketKind::interest);
    dataOut += bits(n ? n->out : empty, PacketKind::data);
  }
  const double k = rep.kappaU;
  rep.wI = k > 1 ? interestOut / (k * (k - 1)) : 0.0;
  rep.wD = dataOut / k;

  for (const auto& v : cfg.vserIds()) {
    VserBandwidth b;
    b.vser = v;
    for (const auto& ue : clients)
      if (cfg.homeOf(ue) == v)
        ++b.clients;
    const NodeBytes* n = node(v);
    const ByteBins& in = n ? n->in : empty;
    const ByteBins& out = n ? n->out : empty;
    b.dlMeasured = bits(in, PacketKind::interest) + bits(in, PacketKind::data);
    b.ulMeasured = bits(out, PacketKind::interest) + bits(out, PacketKind::data);
    BandwidthModelInputs inputs{static_cast<std::uint32_t>(cfg.topology.vsers), b.clients, rep.kappaU, rep.wI,
                                rep.wD};
    b.dlPredicted = predictBandwidthDl(inputs);
    b.ulPredicted = predictBandwidthUl(inputs);
    rep.vsers.push_back(b);
  }
  return rep;
}

std::vector<RepairSample>
underFetchRepairs(const RunResult& run)
{
  std::vector<RepairSample> out;
  const auto& cfg = run.config;
  for (const auto& [key, r] : run.trace->frames()) {
    if (r.complete < 0 || r.firstChunk < 0 || r.totalChunks == 0)
      continue;
    const ConsumerConfig cc = consumerConfigFor(cfg, r.producer.media);
    if (r.totalChunks <= estimateChunks(cc, r.frame))
      continue;
    RepairSample s;
    s.consumer = r.consumer;
    s.producer = r.producer;
    s.frame = r.frame;
    s.firstChunk = r.firstChunk;
    s.complete = r.complete;
    const double rtt = run.pathLatency(r.consumer, r.producer.ue) + run.pathLatency(r.producer.ue, r.consumer);
    // the whole frame is serialized once per hop, at most four hops producer -> consumer;
    // 128 B bounds the name
    const double chunkBytes = cfg.producer.chunkSize + cfg.topology.dataOverhead + 128.0;
    const double serialization = 4.0 * r.totalChunks * chunkBytes * 8.0 / cfg.links.bandwidth * 1000.0;
    s.allowance = rtt + serialization;
    s.pass = s.complete - s.firstChunk <= s.allowance;
    out.push_back(s);
  }
  return out;
}

std::optional<SimTime>
resumeTime(const RunResult& run, const std::string& consumer, const ProducerKey& producer, SimTime after)
{
  const double dec = LatencyBudget::forMedia(run.config, producer.media).dec;
  std::optional<SimTime> best;
  for (const auto& [key, r] : run.trace->frames()) {
    if (r.consumer != consumer || !(r.producer == producer))
      continue;
    if (r.tau <= 0 || r.complete < after || r.complete > r.tau - dec)
      continue;
    if (!best || r.tau < *best)
      best = r.tau;
  }
  return best;
}

std::vector<FirstPlayout>
firstPlayouts(const RunResult& run)
{
  std::map<std::pair<std::string, ProducerKey>, SimTime> firstSeen;
  for (const auto& d : run.trace->notifications())
    firstSeen.try_emplace({d.consumer, d.producer}, d.time);

  std::vector<FirstPlayout> out;
  for (const auto& [key, t] : firstSeen) {
    FirstPlayout f;
    f.consumer = key.first;
    f.producer = key.second;
    f.firstNotification = t;
    const ConsumerConfig cc = consumerConfigFor(run.config, key.second.media);
    const double limit = t + cc.theta + cc.e2eTarget;
    f.firstPlayout = resumeTime(run, key.first, key.second, t);
    if (f.firstPlayout)
      f.pass = *f.firstPlayout <= limit;
    else
      f.pass = limit > run.config.duration; // the deadline lies beyond the run
    out.push_back(f);
  }
  return out;
}

nlohmann::json
summaryJson(const RunResult& run)
{
  using nlohmann::json;
  const auto& cfg = run.config;
  json j;
  j["scenario"] = cfg.name;
  j["seed"] = cfg.seed;
  j["duration_ms"] = cfg.duration;
  j["trace_digest"] = run.trace->digestHex();
  j["trace_records"] = run.trace->records();
  j["events"] = run.events;
  j["config"] = toIni(cfg);

  auto num = [] (double v) { return std::isnan(v) ? json(nullptr) : json(v); };

  json streams = json::array();
  for (const auto& q : computeQuality(run)) {
    streams.push_back({
      {"producer", producerLabel(q.producer)},
      {"consumer", q.consumer},
      {"frames", q.total},
      {"usable", q.usable},
      {"late", q.late},
      {"lost", q.lost},
      {"quality_pct", q.qualityPct()},
      {"within_budget_pct", q.withinBudgetPct()},
      {"deadline_misses", q.deadlineMisses},
      {"p50_latency_ms", num(q.percentile(50))},
      {"p95_latency_ms", num(q.percentile(95))},
      {"p99_latency_ms", num(q.percentile(99))},
    });
  }
  j["per_stream"] = streams;

  const BandwidthReport bw = bandwidthReport(run);
  json vsers = json::array();
  for (const auto& v : bw.vsers) {
    vsers.push_back({
      {"vser", v.vser},
      {"clients", v.clients},
      {"dl_measured", v.dlMeasured},
      {"dl_predicted", v.dlPredicted},
      {"ul_measured", v.ulMeasured},
      {"ul_predicted", v.ulPredicted},
    });
  }
  j["per_vser"] = vsers;
  j["bandwidth_window_ms"] = {bw.window.from, bw.window.to};
  j["w_ue_interest_bps"] = bw.wI;
  j["w_ue_data_bps"] = bw.wD;
  j["notification_overhead"] = notificationOverhead(*run.trace);

  const auto repairs = underFetchRepairs(run);
  j["under_fetched_frames"] = repairs.size();
  j["slow_repairs"] = std::count_if(repairs.begin(), repairs.end(), [] (const auto& r) { return !r.pass; });

  const auto& t = run.trace->totalBytes();
  j["bytes"] = {{"interest", t[0]}, {"data", t[1]}, {"notification", t[2]}};
  j["dropped_packets"] = run.trace->droppedPackets();
  return j;
}

void
writeLatencyCsv(std::ostream& os, const std::vector<StreamQuality>& streams)
{
  os << "consumer,producer,frame,latency_ms\n";
  for (const auto& q : streams)
    for (const auto& [k, l] : q.latencies)
      os << fmt::format("{},{},{},{:.6f}\n", q.consumer, producerLabel(q.producer), k, l);
}

} // namespace srmca
