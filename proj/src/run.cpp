#include "srmca/run.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <ostream>

namespace fs = std::filesystem;

namespace srmca {

ScenarioConfig
resolveScenario(const RunRequest& req)
{
  ScenarioConfig cfg;
  const auto presets = presetNames();
  if (fs::exists(req.scenario))
    cfg = loadScenario(req.scenario);
  else if (std::find(presets.begin(), presets.end(), req.scenario) != presets.end())
    cfg = preset(req.scenario);
  else
    throw ConfigError({"scenario '" + req.scenario + "' is neither a readable file nor a preset"});

  if (req.seed)
    cfg.seed = *req.seed;
  for (const auto& o : req.overrides)
    applyOverride(cfg, o);
  if (auto problems = validate(cfg); !problems.empty())
    throw ConfigError(std::move(problems));
  return cfg;
}

ScenarioConfig
withParticipants(ScenarioConfig cfg, std::uint32_t n)
{
  const bool fanIn = !cfg.topology.consumers.empty() && !cfg.topology.producers.empty();
  double joinAt = -1.0;
  std::vector<ScriptEvent> rest;
  for (const auto& ev : cfg.script) {
    if (ev.kind == ScriptEventKind::join)
      joinAt = joinAt < 0 ? ev.time : std::min(joinAt, ev.time);
    else
      rest.push_back(ev);
  }
  joinAt = std::max(joinAt, 0.0);

  cfg.topology.ues = n;
  const auto ues = cfg.ueIds();
  std::erase_if(rest, [&ues] (const ScriptEvent& ev) { return std::find(ues.begin(), ues.end(), ev.ue) == ues.end(); });
  if (fanIn) {
    cfg.topology.producers.clear();
    for (const auto& ue : ues)
      if (std::find(cfg.topology.consumers.begin(), cfg.topology.consumers.end(), ue) == cfg.topology.consumers.end())
        cfg.topology.producers.push_back(ue);
  }

  cfg.script.clear();
  for (const auto& ue : ues)
    cfg.script.push_back({joinAt, ScriptEventKind::join, ue, cfg.topology.session});
  cfg.script.insert(cfg.script.end(), rest.begin(), rest.end());
  return cfg;
}

namespace {

struct MediaTotals
{
  std::uint64_t total = 0;
  std::uint64_t usable = 0;
  std::uint64_t withinBudget = 0;

  double
  qualityPct() const
  {
    return total == 0 ? 100.0 : 100.0 * static_cast<double>(usable) / static_cast<double>(total);
  }

  double
  budgetPct() const
  {
    return total == 0 ? 100.0 : 100.0 * static_cast<double>(withinBudget) / static_cast<double>(total);
  }
};

std::map<MediaType, MediaTotals>
perMedia(const std::vector<StreamQuality>& streams)
{
  std::map<MediaType, MediaTotals> out;
  for (const auto& q : streams) {
    auto& t = out[q.producer.media];
    t.total += q.total;
    t.usable += q.usable;
    t.withinBudget += q.withinBudget;
  }
  return out;
}

const std::vector<std::string> ARTIFACTS{
  "summary.json", "latency.csv", "packets.csv", "producer.csv",
  "consumer.csv", "sync.csv",    "scenario.csv", "frames.csv",
};

void
writeErrorReport(const std::string& outDir, const std::vector<std::string>& lines)
{
  if (outDir.empty())
    return;
  std::error_code ec;
  fs::create_directories(outDir, ec);
  for (const auto& a : ARTIFACTS)
    fs::remove(fs::path(outDir) / a, ec);
  std::ofstream f(fs::path(outDir) / "error.txt");
  for (const auto& l : lines)
    f << l << '\n';
}

} // namespace

std::vector<StrictCheck>
strictChecks(const RunResult& run)
{
  std::vector<StrictCheck> checks;
  const auto quality = computeQuality(run);
  for (const auto& [media, t] : perMedia(quality)) {
    checks.push_back({fmt::format("{}-latency-budget", toString(media)), t.budgetPct() >= 97.0,
                      fmt::format("{:.2f}% of {} frames within budget", t.budgetPct(), t.total)});
  }
  const double overhead = notificationOverhead(*run.trace);
  checks.push_back({"notification-overhead", overhead < 0.02, fmt::format("{:.4f}", overhead)});

  const auto repairs = underFetchRepairs(run);
  const auto slow = std::count_if(repairs.begin(), repairs.end(), [] (const auto& r) { return !r.pass; });
  checks.push_back({"under-fetch-repair", slow == 0, fmt::format("{} of {} repaired frames slow", slow, repairs.size())});
  return checks;
}

int
cmdRun(const RunRequest& req, std::ostream& out, std::ostream& err)
{
  ScenarioConfig cfg;
  try {
    cfg = resolveScenario(req);
  }
  catch (const ConfigError& e) {
    for (const auto& v : e.violations())
      err << "error: " << v << '\n';
    writeErrorReport(req.outDir, e.violations());
    return EXIT_VALIDATION;
  }

  fs::path staging;
  try {
    if (!req.outDir.empty()) {
      fs::create_directories(req.outDir);
      staging = fs::path(req.outDir) / ".staging";
      fs::remove_all(staging);
      fs::create_directories(staging);
    }

    RunResult run = runScenario(cfg, !staging.empty() && req.formats.contains("csv") ? staging.string() : "");
    nlohmann::json summary = summaryJson(run);

    int status = EXIT_OK;
    if (req.strict) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& c : strictChecks(run)) {
        list.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        if (!c.pass) {
          err << "strict: " << c.name << " failed (" << c.detail << ")\n";
          status = EXIT_STRICT;
        }
      }
      summary["strict"] = list;
    }

    if (!staging.empty()) {
      if (req.formats.contains("json")) {
        std::ofstream f(staging / "summary.json");
        f << summary.dump(2) << '\n';
      }
      if (req.formats.contains("csv")) {
        std::ofstream f(staging / "latency.csv");
        writeLatencyCsv(f, computeQuality(run));
      }
      for (const auto& entry : fs::directory_iterator(staging))
        fs::rename(entry.path(), fs::path(req.outDir) / entry.path().filename());
      fs::remove_all(staging);
      fs::remove(fs::path(req.outDir) / "error.txt");
    }

    const auto media = perMedia(computeQuality(run));
    out << fmt::format("{} seed={} digest={}", cfg.name, cfg.seed, run.trace->digestHex());
    for (const auto& [m, t] : media)
      out << fmt::format(" {}_quality={:.2f}%", toString(m), t.qualityPct());
    out << fmt::format(" notification_overhead={:.4f}\n", notificationOverhead(*run.trace));
    return status;
  }
  catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    if (!staging.empty()) {
      std::error_code ec;
      fs::remove_all(staging, ec);
    }
    writeErrorReport(req.outDir, {e.what()});
    return EXIT_RUNTIME;
  }
}

int
cmdSweep(const RunRequest& base, const std::vector<std::uint32_t>& participants,
         const std::vector<std::uint64_t>& seeds, std::ostream& out, std::ostream& err)
{
  if (participants.empty() || seeds.empty()) {
    err << "error: sweep needs at least one participant count and one seed\n";
    return EXIT_VALIDATION;
  }
  ScenarioConfig baseCfg;
  try {
    baseCfg = resolveScenario(base);
    for (auto n : participants) {
      if (auto problems = validate(withParticipants(baseCfg, n)); !problems.empty())
        throw ConfigError(std::move(problems));
    }
  }
  catch (const ConfigError& e) {
    for (const auto& v : e.violations())
      err << "error: " << v << '\n';
    writeErrorReport(base.outDir, e.violations());
    return EXIT_VALIDATION;
  }

  nlohmann::json rows = nlohmann::json::array();
  std::string table = "participants,seed,audio_quality_pct,video_quality_pct,notification_overhead,digest\n";
  out << fmt::format("{:>12} {:>6} {:>10} {:>10} {:>10}\n", "participants", "seed", "audio %", "video %", "overhead");
  try {
    for (auto n : participants) {
      for (auto seed : seeds) {
        ScenarioConfig cfg = withParticipants(baseCfg, n);
        cfg.seed = seed;
        RunResult run = runScenario(cfg);
        const auto media = perMedia(computeQuality(run));
        auto pct = [&media] (MediaType m) {
          auto it = media.find(m);
          return it == media.end() ? 0.0 : it->second.qualityPct();
        };
        const double overhead = notificationOverhead(*run.trace);
        out << fmt::format("{:>12} {:>6} {:>10.2f} {:>10.2f} {:>10.4f}\n", n, seed, pct(MediaType::audio),
                           pct(MediaType::video), overhead);
        table += fmt::format("{},{},{:.4f},{:.4f},{:.6f},{}\n", n, seed, pct(MediaType::audio),
                             pct(MediaType::video), overhead, run.trace->digestHex());
        rows.push_back({{"participants", n},
                        {"seed", seed},
                        {"audio_quality_pct", pct(MediaType::audio)},
                        {"video_quality_pct", pct(MediaType::video)},
                        {"notification_overhead", overhead},
                        {"trace_digest", run.trace->digestHex()}});
      }
    }
  }
  catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    writeErrorReport(base.outDir, {e.what()});
    return EXIT_RUNTIME;
  }

  if (!base.outDir.empty()) {
    fs::create_directories(base.outDir);
    if (base.formats.contains("csv")) {
      std::ofstream f(fs::path(base.outDir) / "sweep.csv.tmp");
      f << table;
      f.close();
      fs::rename(fs::path(base.outDir) / "sweep.csv.tmp", fs::path(base.outDir) / "sweep.csv");
    }
    if (base.formats.contains("json")) {
      std::ofstream f(fs::path(base.outDir) / "sweep.json.tmp");
      f << nlohmann::json{{"scenario", baseCfg.name}, {"rows", rows}}.dump(2) << '\n';
      f.close();
      fs::rename(fs::path(base.outDir) / "sweep.json.tmp", fs::path(base.outDir) / "sweep.json");
    }
  }
  return EXIT_OK;
}

int
cmdValidate(const std::string& scenario, const std::vector<std::string>& overrides, std::ostream& out,
            std::ostream& err)
{
  RunRequest req;
  req.scenario = scenario;
  req.overrides = overrides;
  try {
    resolveScenario(req);
  }
  catch (const ConfigError& e) {
    for (const auto& v : e.violations())
      out << v << '\n';
    return EXIT_VALIDATION;
  }
  catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return EXIT_VALIDATION;
  }
  out << "ok\n";
  return EXIT_OK;
}

} // namespace srmca
