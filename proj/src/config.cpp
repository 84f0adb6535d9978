#include "srmca/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace srmca {

namespace pt = boost::property_tree;

ConfigError::ConfigError(std::vector<std::string> violations)
  : std::runtime_error([&] {
      std::string s;
      for (const auto& v : violations) {
        if (!s.empty())
          s += "; ";
        s += v;
      }
      return s;
    }())
  , m_violations(std::move(violations))
{
}

std::string_view
toString(ScriptEventKind k)
{
  switch (k) {
    case ScriptEventKind::join: return "join";
    case ScriptEventKind::leave: return "leave";
    case ScriptEventKind::linkDown: return "link_down";
    case ScriptEventKind::linkUp: return "link_up";
  }
  return "?";
}

std::vector<std::string>
ScenarioConfig::ueIds() const
{
  std::vector<std::string> out;
  for (std::uint32_t i = 1; i <= topology.ues; ++i)
    out.push_back("ue" + std::to_string(i));
  return out;
}

std::vector<std::string>
ScenarioConfig::vserIds() const
{
  std::vector<std::string> out;
  for (std::uint32_t i = 1; i <= topology.vsers; ++i)
    out.push_back("csr" + std::to_string(i));
  return out;
}

std::string
ScenarioConfig::homeOf(const std::string& ue) const
{
  if (auto it = topology.homing.find(ue); it != topology.homing.end())
    return it->second;
  const auto ues = ueIds();
  auto pos = std::find(ues.begin(), ues.end(), ue);
  if (pos == ues.end() || topology.vsers == 0)
    return {};
  return "csr" + std::to_string(1 + (pos - ues.begin()) % topology.vsers);
}

bool
ScenarioConfig::isProducer(const std::string& ue) const
{
  const auto& p = topology.producers;
  return p.empty() || std::find(p.begin(), p.end(), ue) != p.end();
}

bool
ScenarioConfig::isConsumer(const std::string& ue) const
{
  const auto& c = topology.consumers;
  return c.empty() || std::find(c.begin(), c.end(), ue) != c.end();
}

// ---- value parsing

namespace {

std::string
trim(std::string_view s)
{
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string>
splitList(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty())
      out.push_back(item);
  }
  return out;
}

void
parseInto(double& out, const std::string& v)
{
  std::size_t n = 0;
  out = std::stod(v, &n);
  if (n != v.size() || !std::isfinite(out))
    throw std::invalid_argument("not a number");
}

void
parseInto(std::uint64_t& out, const std::string& v)
{
  std::size_t n = 0;
  if (v.empty() || v[0] == '-')
    throw std::invalid_argument("not a non-negative integer");
  out = std::stoull(v, &n);
  if (n != v.size())
    throw std::invalid_argument("not a non-negative integer");
}

void
parseInto(std::uint32_t& out, const std::string& v)
{
  std::uint64_t x = 0;
  parseInto(x, v);
  if (x > 0xFFFFFFFFULL)
    throw std::invalid_argument("out of range");
  out = static_cast<std::uint32_t>(x);
}

void
parseInto(bool& out, const std::string& v)
{
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    out = true;
  else if (v == "false" || v == "0" || v == "no" || v == "off")
    out = false;
  else
    throw std::invalid_argument("not a boolean");
}

void
parseInto(std::string& out, const std::string& v)
{
  out = v;
}

void
parseInto(std::vector<std::string>& out, const std::string& v)
{
  out = v == "all" ? std::vector<std::string>{} : splitList(v, ',');
}

std::string
formatValue(double v)
{
  return fmt::format("{}", v);
}

std::string
formatValue(std::uint64_t v)
{
  return std::to_string(v);
}

std::string
formatValue(std::uint32_t v)
{
  return std::to_string(v);
}

std::string
formatValue(bool v)
{
  return v ? "true" : "false";
}

std::string
formatValue(const std::string& v)
{
  return v;
}

std::string
formatValue(const std::vector<std::string>& v)
{
  if (v.empty())
    return "all";
  std::string s;
  for (const auto& x : v)
    s += (s.empty() ? "" : ",") + x;
  return s;
}

struct Field
{
  std::string section;
  std::string key;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template<typename Accessor>
Field
field(std::string section, std::string key, Accessor acc)
{
  return {std::move(section), std::move(key),
          [acc] (ScenarioConfig& c, const std::string& v) { parseInto(acc(c), v); },
          [acc] (const ScenarioConfig& c) { return formatValue(acc(const_cast<ScenarioConfig&>(c))); }};
}

const std::vector<Field>&
fields()
{
  static const std::vector<Field> table = [] {
    using C = ScenarioConfig;
    std::vector<Field> f;
    // scenario identity lives with the script
    f.push_back(field("script", "name", [] (C& c) -> auto& { return c.name; }));
    f.push_back(field("script", "seed", [] (C& c) -> auto& { return c.seed; }));
    f.push_back({"script", "duration",
                 [] (C& c, const std::string& v) { double s; parseInto(s, v); c.duration = s * 1000.0; },
                 [] (const C& c) { return formatValue(c.duration / 1000.0); }});

    f.push_back(field("topology", "vsers", [] (C& c) -> auto& { return c.topology.vsers; }));
    f.push_back(field("topology", "ues", [] (C& c) -> auto& { return c.topology.ues; }));
    f.push_back(field("topology", "session", [] (C& c) -> auto& { return c.topology.session; }));
    f.push_back(field("topology", "manager", [] (C& c) -> auto& { return c.topology.manager; }));
    f.push_back(field("topology", "producers", [] (C& c) -> auto& { return c.topology.producers; }));
    f.push_back(field("topology", "consumers", [] (C& c) -> auto& { return c.topology.consumers; }));
    f.push_back(field("topology", "notification_bytes", [] (C& c) -> auto& { return c.topology.notificationBytes; }));
    f.push_back(field("topology", "interest_overhead", [] (C& c) -> auto& { return c.topology.interestOverhead; }));
    f.push_back(field("topology", "data_overhead", [] (C& c) -> auto& { return c.topology.dataOverhead; }));
    f.push_back(field("topology", "history_depth", [] (C& c) -> auto& { return c.topology.historyDepth; }));

    f.push_back(field("links", "ue_up_min", [] (C& c) -> auto& { return c.links.ueUpMin; }));
    f.push_back(field("links", "ue_up_max", [] (C& c) -> auto& { return c.links.ueUpMax; }));
    f.push_back(field("links", "ue_down_min", [] (C& c) -> auto& { return c.links.ueDownMin; }));
    f.push_back(field("links", "ue_down_max", [] (C& c) -> auto& { return c.links.ueDownMax; }));
    f.push_back(field("links", "core_latency", [] (C& c) -> auto& { return c.links.coreLatency; }));
    f.push_back(field("links", "bandwidth", [] (C& c) -> auto& { return c.links.bandwidth; }));

    f.push_back(field("media", "video", [] (C& c) -> auto& { return c.media.video; }));
    f.push_back(field("media", "audio", [] (C& c) -> auto& { return c.media.audio; }));
    f.push_back(field("media", "text", [] (C& c) -> auto& { return c.media.text; }));
    f.push_back(field("media", "key_min", [] (C& c) -> auto& { return c.media.videoModel.key.lo; }));
    f.push_back(field("media", "key_max", [] (C& c) -> auto& { return c.media.videoModel.key.hi; }));
    f.push_back(field("media", "delta_min", [] (C& c) -> auto& { return c.media.videoModel.delta.lo; }));
    f.push_back(field("media", "delta_max", [] (C& c) -> auto& { return c.media.videoModel.delta.hi; }));
    f.push_back(field("media", "oversize_probability", [] (C& c) -> auto& { return c.media.videoModel.oversizeProbability; }));
    f.push_back(field("media", "oversize_min", [] (C& c) -> auto& { return c.media.videoModel.oversize.lo; }));
    f.push_back(field("media", "oversize_max", [] (C& c) -> auto& { return c.media.videoModel.oversize.hi; }));
    f.push_back(field("media", "audio_bitrate", [] (C& c) -> auto& { return c.media.audioBitrate; }));
    f.push_back(field("media", "audio_interval", [] (C& c) -> auto& { return c.media.audioInterval; }));
    f.push_back(field("media", "text_interval", [] (C& c) -> auto& { return c.media.textInterval; }));
    f.push_back(field("media", "text_min", [] (C& c) -> auto& { return c.media.textSize.lo; }));
    f.push_back(field("media", "text_max", [] (C& c) -> auto& { return c.media.textSize.hi; }));
    f.push_back(field("media", "video_trace", [] (C& c) -> auto& { return c.media.videoTrace; }));

    f.push_back(field("producer", "rho_f", [] (C& c) -> auto& { return c.producer.fps; }));
    f.push_back(field("producer", "sigma", [] (C& c) -> auto& { return c.producer.gopSize; }));
    f.push_back(field("producer", "k_notify", [] (C& c) -> auto& { return c.producer.kNotify; }));
    f.push_back(field("producer", "l_chunk", [] (C& c) -> auto& { return c.producer.chunkSize; }));
    f.push_back(field("producer", "n_I_buf", [] (C& c) -> auto& { return c.producer.interestBufferFrames; }));
    f.push_back(field("producer", "theta", [] (C& c) -> auto& { return c.producer.theta; }));
    f.push_back(field("producer", "omega", [] (C& c) -> auto& { return c.producer.omega; }));
    f.push_back(field("producer", "xi", [] (C& c) -> auto& { return c.producer.xi; }));
    f.push_back(field("producer", "eps_ir_key", [] (C& c) -> auto& { return c.producer.keyChunks; }));
    f.push_back(field("producer", "eps_ir_delta", [] (C& c) -> auto& { return c.producer.deltaChunks; }));

    f.push_back(field("consumer", "n_R_buf", [] (C& c) -> auto& { return c.consumer.receiveBufferFrames; }));
    f.push_back(field("consumer", "delta_dejitter", [] (C& c) -> auto& { return c.consumer.dejitter; }));
    f.push_back(field("consumer", "delta_enc_video", [] (C& c) -> auto& { return c.consumer.videoEncode; }));
    f.push_back(field("consumer", "delta_dec_video", [] (C& c) -> auto& { return c.consumer.videoDecode; }));
    f.push_back(field("consumer", "delta_enc_audio", [] (C& c) -> auto& { return c.consumer.audioEncode; }));
    f.push_back(field("consumer", "delta_dec_audio", [] (C& c) -> auto& { return c.consumer.audioDecode; }));
    f.push_back(field("consumer", "delta_e2e_video", [] (C& c) -> auto& { return c.consumer.videoE2e; }));
    f.push_back(field("consumer", "delta_e2e_audio", [] (C& c) -> auto& { return c.consumer.audioE2e; }));
    f.push_back(field("consumer", "delta_rtt", [] (C& c) -> auto& { return c.consumer.rtt; }));
    f.push_back(field("consumer", "delta_rtt_max", [] (C& c) -> auto& { return c.consumer.rttMax; }));
    f.push_back(field("consumer", "beta", [] (C& c) -> auto& { return c.consumer.beta; }));
    f.push_back(field("consumer", "gamma", [] (C& c) -> auto& { return c.consumer.gamma; }));
    return f;
  }();
  return table;
}

const Field*
findField(const std::string& section, const std::string& key)
{
  for (const auto& f : fields())
    if (f.section == section && f.key == key)
      return &f;
  return nullptr;
}

ScriptEvent
parseScriptEvent(const std::string& value)
{
  std::istringstream is(value);
  std::string t, kind;
  ScriptEvent ev;
  if (!(is >> t >> kind >> ev.ue))
    throw std::invalid_argument("expected '<seconds> <kind> <ue> [session]'");
  double seconds = 0;
  parseInto(seconds, t);
  ev.time = seconds * 1000.0;
  if (kind == "join")
    ev.kind = ScriptEventKind::join;
  else if (kind == "leave")
    ev.kind = ScriptEventKind::leave;
  else if (kind == "link_down")
    ev.kind = ScriptEventKind::linkDown;
  else if (kind == "link_up")
    ev.kind = ScriptEventKind::linkUp;
  else
    throw std::invalid_argument("unknown event kind '" + kind + "'");
  is >> ev.conf;
  std::string extra;
  if (is >> extra)
    throw std::invalid_argument("trailing '" + extra + "'");
  return ev;
}

/// Applies one key; problems are appended to errors.
void
applyKey(ScenarioConfig& cfg, const std::string& section, const std::string& key,
         const std::string& rawValue, std::vector<std::string>& errors, bool& scriptCleared)
{
  const std::string value = trim(rawValue);
  const std::string where = section + "." + key;

  if (section == "topology" && key.starts_with("home_")) {
    cfg.topology.homing[key.substr(5)] = value;
    return;
  }
  if (section == "script" && !findField(section, key)) {
    if (!scriptCleared) {
      cfg.script.clear();
      scriptCleared = true;
    }
    try {
      cfg.script.push_back(parseScriptEvent(value));
    }
    catch (const std::exception& e) {
      errors.push_back(where + ": " + e.what());
    }
    return;
  }
  const Field* f = findField(section, key);
  if (f == nullptr) {
    errors.push_back("unknown key '" + where + "'");
    return;
  }
  try {
    f->set(cfg, value);
  }
  catch (const std::exception& e) {
    errors.push_back(where + ": bad value '" + value + "' (" + e.what() + ")");
  }
}

} // namespace

ScenarioConfig
parseScenario(const std::string& text)
{
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  }
  catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("malformed scenario file: ") + e.message() + " (line " +
                       std::to_string(e.line()) + ")"});
  }

  static const std::set<std::string> sections{"topology", "links", "media", "producer", "consumer", "script"};
  ScenarioConfig cfg;
  std::vector<std::string> errors;
  bool scriptCleared = false;
  for (const auto& [section, body] : tree) {
    if (!sections.contains(section)) {
      errors.push_back(body.empty() ? "key '" + section + "' outside any section"
                                    : "unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, node] : body)
      applyKey(cfg, section, key, node.data(), errors, scriptCleared);
  }
  if (!errors.empty())
    throw ConfigError(std::move(errors));
  return cfg;
}

ScenarioConfig
loadScenario(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError({"cannot read scenario file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parseScenario(ss.str());
}

void
applyOverride(ScenarioConfig& cfg, const std::string& assignment)
{
  auto eq = assignment.find('=');
  auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError({"override '" + assignment + "' is not section.key=value"});
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  std::vector<std::string> errors;
  bool scriptCleared = true; // overrides append script events
  applyKey(cfg, section, key, assignment.substr(eq + 1), errors, scriptCleared);
  if (!errors.empty())
    throw ConfigError(std::move(errors));
}

std::string
toIni(const ScenarioConfig& cfg)
{
  std::string out;
  std::string current;
  for (const auto& f : fields()) {
    if (f.section == "script")
      continue;
    if (f.section != current) {
      out += (out.empty() ? "[" : "\n[") + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + f.get(cfg) + "\n";
    if (f.key == "history_depth")
      for (const auto& [ue, vser] : cfg.topology.homing)
        out += "home_" + ue + " = " + vser + "\n";
  }
  out += "\n[script]\n";
  for (const auto& f : fields())
    if (f.section == "script")
      out += f.key + " = " + f.get(cfg) + "\n";
  std::size_t i = 0;
  for (const auto& ev : cfg.script) {
    out += fmt::format("e{} = {} {} {}", ++i, ev.time / 1000.0, toString(ev.kind), ev.ue);
    if (!ev.conf.empty())
      out += " " + ev.conf;
    out += "\n";
  }
  return out;
}

// ---- validation

std::vector<std::string>
validate(const ScenarioConfig& cfg)
{
  std::vector<std::string> v;
  auto require = [&v] (bool ok, std::string msg) {
    if (!ok)
      v.push_back(std::move(msg));
  };

  const auto& p = cfg.producer;
  const auto& c = cfg.consumer;
  const auto& t = cfg.topology;
  const auto& l = cfg.links;
  const auto& m = cfg.media;

  require(cfg.duration > 0, "script.duration must be > 0");
  require(p.fps > 0, "rho_f must be > 0");
  require(p.gopSize >= 1, "sigma must be >= 1");
  require(p.kNotify >= 1, "k_notify must be >= 1");
  require(p.chunkSize >= 1, "l_chunk must be >= 1");
  require(p.interestBufferFrames >= 1, "n_I_buf must be >= 1");
  require(p.theta >= 0, "theta must be >= 0");
  require(p.omega > 0 && p.omega < 1, "ω must be in (0,1) (producer.omega)");
  require(p.xi > 1, "ξ must be > 1 (producer.xi)");
  require(p.keyChunks >= 1 && p.deltaChunks >= 1, "eps_ir_key and eps_ir_delta must be >= 1");
  if (p.fps > 0) {
    const double nTheta = p.theta * p.fps / 1000.0;
    require(std::abs(nTheta - std::round(nTheta)) < 1e-9, "theta * rho_f must be a whole number of frames");
    require(p.xi * std::round(nTheta) >= std::round(nTheta) + c.receiveBufferFrames,
            "xi * n_theta must cover n_theta + n_R_buf, otherwise the fairness check drops pre-fetch Interests");
  }

  require(c.receiveBufferFrames >= 1, "n_R_buf must be >= 1");
  require(c.beta > 0 && c.beta < 1, "beta must be in (0,1)");
  require(c.gamma > 0 && c.gamma < 1, "gamma must be in (0,1)");
  require(c.dejitter >= 0 && c.videoEncode >= 0 && c.videoDecode >= 0 && c.audioEncode >= 0 &&
            c.audioDecode >= 0, "codec and de-jitter delays must be >= 0");
  require(c.rtt > 0 && c.rttMax >= c.rtt, "need 0 < delta_rtt <= delta_rtt_max");
  require(c.videoE2e > c.rtt / 2 + c.dejitter + c.videoDecode,
          "delta_e2e_video must exceed delta_rtt/2 + delta_dejitter + delta_dec_video");
  require(c.audioE2e > c.rtt / 2 + c.dejitter + c.audioDecode,
          "delta_e2e_audio must exceed delta_rtt/2 + delta_dejitter + delta_dec_audio");

  require(m.video || m.audio || m.text, "at least one of media.video/audio/text must be enabled");
  auto rangeOk = [] (SizeRange r) { return r.lo >= 1 && r.lo <= r.hi; };
  require(rangeOk(m.videoModel.key), "key frame size range must satisfy 1 <= key_min <= key_max");
  require(rangeOk(m.videoModel.delta), "delta frame size range must satisfy 1 <= delta_min <= delta_max");
  require(rangeOk(m.videoModel.oversize), "oversize range must satisfy 1 <= oversize_min <= oversize_max");
  require(m.videoModel.oversizeProbability >= 0 && m.videoModel.oversizeProbability <= 1,
          "oversize_probability must be in [0,1]");
  require(rangeOk(m.textSize), "text size range must satisfy 1 <= text_min <= text_max");
  require(m.textInterval > 0, "text_interval must be > 0");
  if (m.audio) {
    const double bytes = m.audioBitrate * m.audioInterval / 8000.0;
    require(m.audioBitrate > 0 && m.audioInterval > 0 && bytes >= 1 && std::abs(bytes - std::round(bytes)) < 1e-9,
            "audio_bitrate * audio_interval must give a whole-byte payload");
    const double gopMs = p.gopSize * 1000.0 / p.fps;
    const double ratio = gopMs / m.audioInterval;
    require(m.audioInterval > 0 && std::abs(ratio - std::round(ratio)) < 1e-9,
            "audio_interval must divide the video GOP duration");
  }
  if (m.text)
    require(std::abs(p.theta / m.textInterval - std::round(p.theta / m.textInterval)) < 1e-9,
            "text_interval must divide theta");

  require(l.ueUpMin >= 0 && l.ueUpMin <= l.ueUpMax, "links: need 0 <= ue_up_min <= ue_up_max");
  require(l.ueDownMin >= 0 && l.ueDownMin <= l.ueDownMax, "links: need 0 <= ue_down_min <= ue_down_max");
  require(l.coreLatency >= 0, "links.core_latency must be >= 0");
  require(l.bandwidth > 0, "links.bandwidth must be > 0");

  require(t.vsers >= 1, "topology.vsers must be >= 1");
  require(t.ues >= 1, "topology.ues must be >= 1");
  require(t.historyDepth >= 1, "topology.history_depth must be >= 1");
  try {
    checkIdentifier(t.session, "session id");
  }
  catch (const std::exception& e) {
    v.push_back(std::string("topology.session: ") + e.what());
  }
  const auto ues = cfg.ueIds();
  const auto vsers = cfg.vserIds();
  auto known = [] (const std::vector<std::string>& set, const std::string& x) {
    return std::find(set.begin(), set.end(), x) != set.end();
  };
  require(t.manager == "router" || known(vsers, t.manager),
          "topology.manager '" + t.manager + "' is neither 'router' nor a VSER");
  for (const auto& [ue, vser] : t.homing) {
    require(known(ues, ue), "homing refers to unknown UE '" + ue + "'");
    require(known(vsers, vser), "UE '" + ue + "' homed to unknown VSER '" + vser + "'");
  }
  for (const auto& ue : t.producers)
    require(known(ues, ue), "topology.producers lists unknown UE '" + ue + "'");
  for (const auto& ue : t.consumers)
    require(known(ues, ue), "topology.consumers lists unknown UE '" + ue + "'");

  double last = 0;
  for (const auto& ev : cfg.script) {
    const std::string what = fmt::format("script event '{} {} {}'", ev.time / 1000.0, toString(ev.kind), ev.ue);
    require(ev.time >= last, what + ": times must be non-decreasing");
    require(ev.time >= 0 && ev.time <= cfg.duration, what + ": time outside [0, duration]");
    require(known(ues, ev.ue), what + ": unknown UE");
    if (ev.kind == ScriptEventKind::join)
      require(ev.conf.empty() || ev.conf == t.session, what + ": session '" + ev.conf + "' is not provisioned");
    last = std::max(last, ev.time);
  }
  return v;
}

// ---- presets

namespace {

ScenarioConfig
allJoinAt(ScenarioConfig cfg, double at)
{
  cfg.script.clear();
  for (const auto& ue : cfg.ueIds())
    cfg.script.push_back({at, ScriptEventKind::join, ue, cfg.topology.session});
  return cfg;
}

} // namespace

std::vector<std::string>
presetNames()
{
  return {"baseline-3p", "baseline-6p", "baseline-9p", "baseline-12p", "baseline-15p",
          "fanin-19p", "fanin-28p", "fanin-37p", "fanin-46p",
          "failure-recovery", "staggered-join"};
}

ScenarioConfig
preset(const std::string& name)
{
  ScenarioConfig cfg;
  cfg.name = name;
  auto count = [&name] (std::string_view prefix) -> std::uint32_t {
    std::string n = name.substr(prefix.size());
    n.pop_back(); // trailing 'p'
    return static_cast<std::uint32_t>(std::stoul(n));
  };

  const auto names = presetNames();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError({"unknown preset '" + name + "'"});

  if (name.starts_with("baseline-")) {
    cfg.topology.ues = count("baseline-");
    return allJoinAt(cfg, 0.0);
  }
  if (name.starts_with("fanin-")) {
    cfg.topology.ues = count("fanin-");
    cfg.topology.consumers = {"ue1"};
    for (std::uint32_t i = 2; i <= cfg.topology.ues; ++i)
      cfg.topology.producers.push_back("ue" + std::to_string(i));
    return allJoinAt(cfg, 0.0);
  }
  if (name == "failure-recovery") {
    // consumer ue2 loses its access link for 3 s
    cfg.topology.ues = 2;
    cfg = allJoinAt(cfg, 0.0);
    cfg.script.push_back({8000.0, ScriptEventKind::linkDown, "ue2", ""});
    cfg.script.push_back({11000.0, ScriptEventKind::linkUp, "ue2", ""});
    return cfg;
  }
  // staggered-join: one join every 2 s, then one participant leaves
  cfg.topology.ues = 6;
  cfg.duration = 24000.0;
  for (std::uint32_t i = 1; i <= 6; ++i)
    cfg.script.push_back({(i - 1) * 2000.0, ScriptEventKind::join, "ue" + std::to_string(i), cfg.topology.session});
  cfg.script.push_back({16000.0, ScriptEventKind::leave, "ue3", ""});
  return cfg;
}

// ---- derived per-media parameters

ProducerConfig
producerConfigFor(const ScenarioConfig& cfg, MediaType media)
{
  ProducerConfig p = cfg.producer;
  if (media == MediaType::video)
    return p;

  const double videoTf = 1000.0 / p.fps;
  const double tf = media == MediaType::audio ? cfg.media.audioInterval : cfg.media.textInterval;
  const double scale = videoTf / tf; // frames of this media per video frame
  p.fps = 1000.0 / tf;
  p.gopSize = media == MediaType::audio
                ? static_cast<std::uint32_t>(std::llround(cfg.producer.gopSize * scale))
                : 1;
  p.interestBufferFrames = std::max<std::uint32_t>(
    1, static_cast<std::uint32_t>(std::llround(cfg.producer.interestBufferFrames * scale)));
  p.keyChunks = 1;
  p.deltaChunks = 1;
  return p;
}

ConsumerConfig
consumerConfigFor(const ScenarioConfig& cfg, MediaType media)
{
  const ProducerConfig p = producerConfigFor(cfg, media);
  const double scale = (1000.0 / cfg.producer.fps) / (1000.0 / p.fps);
  ConsumerConfig c;
  c.fps = p.fps;
  c.gopSize = p.gopSize;
  c.theta = p.theta;
  c.receiveBufferFrames = std::max<std::uint32_t>(
    1, static_cast<std::uint32_t>(std::llround(cfg.consumer.receiveBufferFrames * scale)));
  c.dejitter = cfg.consumer.dejitter;
  c.rttEstimate = cfg.consumer.rtt;
  c.beta = cfg.consumer.beta;
  c.gamma = cfg.consumer.gamma;
  c.keyChunks = p.keyChunks;
  c.deltaChunks = p.deltaChunks;
  if (media == MediaType::video) {
    c.encodeDelay = cfg.consumer.videoEncode;
    c.decodeDelay = cfg.consumer.videoDecode;
    c.e2eTarget = cfg.consumer.videoE2e;
  }
  else {
    c.encodeDelay = cfg.consumer.audioEncode;
    c.decodeDelay = cfg.consumer.audioDecode;
    c.e2eTarget = cfg.consumer.audioE2e;
  }
  return c;
}

double
interestLifetime(const ScenarioConfig& cfg)
{
  return prefetchDelay(cfg.producer.theta, cfg.producer.interestBufferFrames, cfg.producer.fps) +
         2.0 * cfg.consumer.rttMax;
}

} // namespace srmca
