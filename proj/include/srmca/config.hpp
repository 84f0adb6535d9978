#ifndef SRMCA_CONFIG_HPP
#define SRMCA_CONFIG_HPP

#include "srmca/consumer.hpp"
#include "srmca/media.hpp"
#include "srmca/producer.hpp"

#include <map>
#include <string>
#include <vector>

namespace srmca {

/// Bad scenario input. what() joins every violation found.
class ConfigError : public std::runtime_error
{
public:
  explicit
  ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>&
  violations() const
  {
    return m_violations;
  }

private:
  std::vector<std::string> m_violations;
};

struct TopologyConfig
{
  std::uint32_t vsers = 3;
  std::uint32_t ues = 3;
  std::string session = "conf1";
  std::string manager = "router";         ///< "router" or a VSER id
  std::map<std::string, std::string> homing; ///< explicit ue -> vser; others round-robin
  std::vector<std::string> producers;     ///< empty = every UE
  std::vector<std::string> consumers;     ///< empty = every UE
  std::uint32_t notificationBytes = 120;
  std::uint32_t interestOverhead = 20;
  std::uint32_t dataOverhead = 40;
  std::uint32_t historyDepth = 8;
};

struct LinkConfig
{
  double ueUpMin = 30.0;    ///< UE -> VSER latency range, ms
  double ueUpMax = 50.0;
  double ueDownMin = 1.0;   ///< VSER -> UE
  double ueDownMax = 1.0;
  double coreLatency = 1.0; ///< VSER <-> router
  double bandwidth = 1e9;   ///< bits/s
};

struct MediaConfig
{
  bool video = true;
  bool audio = true;
  bool text = false;
  VideoModelConfig videoModel;
  double audioBitrate = 30000.0;
  double audioInterval = 20.0;
  double textInterval = 1000.0;
  SizeRange textSize{20, 200};
  std::string videoTrace; ///< optional frame-size CSV replacing the video model
};

/// Consumer-side parameters shared by every consumer in the run.
struct ConsumerParams
{
  std::uint32_t receiveBufferFrames = 100;
  double dejitter = 40.0;
  double videoEncode = 20.0;
  double videoDecode = 10.0;
  double audioEncode = 15.0;
  double audioDecode = 5.0;
  double videoE2e = 250.0;
  double audioE2e = 150.0;
  double rtt = 80.0;
  double rttMax = 200.0;
  double beta = 0.5;
  double gamma = 0.5;
};

enum class ScriptEventKind : std::uint8_t { join, leave, linkDown, linkUp };

std::string_view
toString(ScriptEventKind k);

struct ScriptEvent
{
  double time = 0.0; ///< ms
  ScriptEventKind kind = ScriptEventKind::join;
  std::string ue;
  std::string conf;  ///< join only
};

struct ScenarioConfig
{
  std::string name = "custom";
  std::uint64_t seed = 1;
  double duration = 20000.0; ///< ms
  TopologyConfig topology;
  LinkConfig links;
  MediaConfig media;
  ProducerConfig producer;   ///< video values; audio/text derive from them
  ConsumerParams consumer;
  std::vector<ScriptEvent> script;

  std::vector<std::string>
  ueIds() const;

  std::vector<std::string>
  vserIds() const;

  /// Home VSER of a UE (explicit homing, else round-robin).
  std::string
  homeOf(const std::string& ue) const;

  bool
  isProducer(const std::string& ue) const;

  bool
  isConsumer(const std::string& ue) const;
};

/** \brief Reads an INI scenario.
 *  \throw ConfigError on unknown keys or malformed values (all listed)
 */
ScenarioConfig
parseScenario(const std::string& text);

ScenarioConfig
loadScenario(const std::string& path);

/// "section.key=value"; later calls win.
/// \throw ConfigError naming the key
void
applyOverride(ScenarioConfig& cfg, const std::string& assignment);

/// Every constraint violation; empty means valid.
std::vector<std::string>
validate(const ScenarioConfig& cfg);

/// Effective configuration as INI text; parseScenario(toIni(c)) reproduces c.
std::string
toIni(const ScenarioConfig& cfg);

std::vector<std::string>
presetNames();

/// \throw ConfigError for an unknown preset
ScenarioConfig
preset(const std::string& name);

/// Per-media algorithm parameters. Audio and text reuse the video values
/// scaled to the same durations.
ProducerConfig
producerConfigFor(const ScenarioConfig& cfg, MediaType media);

ConsumerConfig
consumerConfigFor(const ScenarioConfig& cfg, MediaType media);

/// Interest lifetime: theta + n_I_buf / rho_f + 2 * delta_rtt_max.
double
interestLifetime(const ScenarioConfig& cfg);

} // namespace srmca

#endif // SRMCA_CONFIG_HPP
