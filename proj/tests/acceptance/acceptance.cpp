// Acceptance checks. Each test case prints one "criterion N: PASS|FAIL ..."
// line and fails when the criterion does not hold.

#include "reference/harness.hpp"

#include "srmca/run.hpp"

#include <doctest.h>
#include <fmt/format.h>

#include <chrono>
#include <limits>
#include <iostream>

using namespace srmca;

namespace {

struct TimedRun
{
  RunResult run;
  double seconds = 0.0;
};

TimedRun
timed(const ScenarioConfig& cfg)
{
  const auto t0 = std::chrono::steady_clock::now();
  TimedRun t{runScenario(cfg)};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

/// Preset runs shared by the criteria that look at the same scenario.
const TimedRun&
presetRun(const std::string& name)
{
  static std::map<std::string, TimedRun> cache;
  auto it = cache.find(name);
  if (it == cache.end())
    it = cache.emplace(name, timed(preset(name))).first;
  return it->second;
}

bool
report(int n, bool pass, const std::string& detail)
{
  std::cout << fmt::format("criterion {}: {} {}", n, pass ? "PASS" : "FAIL", detail) << std::endl;
  return pass;
}

const std::vector<std::string> BASELINES{"baseline-3p", "baseline-6p", "baseline-9p", "baseline-12p", "baseline-15p"};

} // namespace

TEST_CASE("criterion-1: video play-out resumes within one GOP of link restoration")
{
  const auto& [run, seconds] = presetRun("failure-recovery");
  const auto& cfg = run.config;
  double linkUp = -1.0;
  std::string ue;
  for (const auto& ev : cfg.script) {
    if (ev.kind == ScriptEventKind::linkUp) {
      linkUp = ev.time;
      ue = ev.ue;
    }
  }
  REQUIRE(linkUp > 0);
  const auto video = producerConfigFor(cfg, MediaType::video);
  const double gop = video.gopSize * video.frameInterval();
  const double tolerance = video.notifyInterval();

  bool pass = seconds < 5.0;
  std::string detail;
  int streams = 0;
  for (const auto& consumer : cfg.ueIds()) {
    for (const auto& producer : cfg.ueIds()) {
      if (consumer == producer || (consumer != ue && producer != ue))
        continue;
      const ProducerKey key{producer, MediaType::video};
      std::optional<SimTime> notified;
      for (const auto& d : run.trace->notifications()) {
        if (d.consumer == consumer && d.producer == key && d.time >= linkUp) {
          notified = d.time;
          break;
        }
      }
      const auto resumed = resumeTime(run, consumer, key, linkUp);
      const double delivery = notified ? *notified - linkUp : 0.0;
      const double bound = linkUp + gop + delivery + tolerance;
      const bool ok = notified && resumed && *resumed <= bound;
      pass = pass && ok;
      ++streams;
      detail += fmt::format(" [{}<-{} resumed {:.0f} ms after link-up, bound {:.0f}]", consumer, producer,
                            resumed ? *resumed - linkUp : -1.0, bound - linkUp);
    }
  }
  pass = pass && streams > 0;
  CHECK(report(1, pass, fmt::format("run {:.2f} s;{}", seconds, detail)));
}

TEST_CASE("criterion-2: per-VSER bandwidth matches the model within 2%")
{
  const auto& [run, seconds] = presetRun("baseline-15p");
  const auto bw = bandwidthReport(run);
  bool pass = seconds < 30.0 && !bw.vsers.empty();
  std::string detail = fmt::format("run {:.2f} s; window {:.0f}-{:.0f} ms, w_I {:.0f} b/s, w_D {:.0f} b/s;",
                                   seconds, bw.window.from, bw.window.to, bw.wI, bw.wD);
  for (const auto& v : bw.vsers) {
    pass = pass && std::abs(v.dlError()) <= 0.02 && std::abs(v.ulError()) <= 0.02;
    detail += fmt::format(" [{} k={} dl {:.3f}/{:.3f} Mb/s err {:+.1f}%, ul {:.3f}/{:.3f} Mb/s err {:+.1f}%]", v.vser,
                          v.clients, v.dlMeasured / 1e6, v.dlPredicted / 1e6, 100 * v.dlError(), v.ulMeasured / 1e6,
                          v.ulPredicted / 1e6, 100 * v.ulError());
  }
  CHECK(report(2, pass, detail));
}

TEST_CASE("criterion-3: notification overhead below 2%")
{
  bool pass = true;
  std::string detail;
  for (const auto* name : {"baseline-6p", "baseline-15p"}) {
    const double overhead = notificationOverhead(*presetRun(name).run.trace);
    pass = pass && overhead < 0.02;
    detail += fmt::format(" {} {:.4f}", name, overhead);
  }
  CHECK(report(3, pass, detail));
}

TEST_CASE("criterion-4: at least 97% of frames within the one-way budget")
{
  bool pass = true;
  std::string detail;
  for (const auto& name : BASELINES) {
    std::map<MediaType, std::pair<std::uint64_t, std::uint64_t>> perMedia; // within, total
    for (const auto& q : computeQuality(presetRun(name).run)) {
      perMedia[q.producer.media].first += q.withinBudget;
      perMedia[q.producer.media].second += q.total;
    }
    detail += " " + name;
    for (auto media : {MediaType::audio, MediaType::video}) {
      const auto [within, total] = perMedia[media];
      const double pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(within) / static_cast<double>(total);
      pass = pass && total > 0 && pct >= 97.0;
      detail += fmt::format(" {} {:.2f}%", toString(media), pct);
    }
  }
  CHECK(report(4, pass, detail));
}

TEST_CASE("criterion-5: under-fetched frames complete within one extra round trip")
{
  const auto& run = presetRun("baseline-15p").run;
  REQUIRE(run.config.media.videoModel.oversizeProbability == 0.1);
  const auto repairs = underFetchRepairs(run);
  std::size_t slow = 0;
  double slack = std::numeric_limits<double>::infinity();
  double longest = 0.0;
  for (const auto& r : repairs) {
    slow += r.pass ? 0 : 1;
    slack = std::min(slack, r.allowance - (r.complete - r.firstChunk));
    longest = std::max(longest, r.complete - r.firstChunk);
  }
  const bool pass = !repairs.empty() && slow == 0;
  CHECK(report(5, pass, fmt::format("{} repaired frames, {} slow, longest repair {:.2f} ms, smallest slack {:.3f} ms "
                                    "(allowance: path round trip plus serialization)",
                                    repairs.size(), slow, longest, slack)));
}

TEST_CASE("criterion-6: reference interpreter reproduces the state machines")
{
  const auto sum = oracle::compare(1000);
  std::string detail = fmt::format("{} scenarios, {} mismatching, {} observations, {} play-out times", sum.scenarios,
                                   sum.mismatches, sum.steps, sum.schedules);
  for (const auto& d : sum.diffs)
    detail += "; " + d;
  CHECK(report(6, sum.scenarios == 1000 && sum.mismatches == 0, detail));
}

TEST_CASE("criterion-7: same seed, same trace digest")
{
  bool pass = true;
  std::string detail;
  for (const auto& name : presetNames()) {
    const auto cfg = preset(name);
    const auto a = runScenario(cfg).trace->digestHex();
    const auto b = runScenario(cfg).trace->digestHex();
    pass = pass && a == b;
    detail += fmt::format(" {}={}{}", name, a, a == b ? "" : "!=" + b);
  }
  CHECK(report(7, pass, detail));
}

TEST_CASE("criterion-8: play-out and pre-fetch worked values")
{
  const ConsumerConfig cc;
  const double first = computePlayoutTime(125, 100, 0.0, cc);
  const double next = successorPlayoutTime(first, cc.frameInterval());
  const double prefetch = prefetchDelay(1000.0, 100, 25.0);

  FrameRecord r;
  r.frame = 125;
  r.tau = first;
  r.totalChunks = 1;
  const auto check = playoutDeadlineCheck(r, 100, 0.0, cc, 100, cc.rttEstimate);

  const bool pass = first == 1120.0 && next == 1160.0 && prefetch == 5000.0 && check.prefetch == 5000.0 && check.pass;
  CHECK(report(8, pass, fmt::format("tau_first {} ms, tau_next {} ms, pre-fetch {} ms, deadline check prefetch {} ms",
                                    first, next, prefetch, check.prefetch)));
}

TEST_CASE("criterion-9: late joiners start in time and leaves do not disturb others")
{
  const auto& [run, seconds] = presetRun("staggered-join");
  const auto& cfg = run.config;

  const auto starts = firstPlayouts(run);
  std::size_t late = 0;
  double worst = 0.0;
  for (const auto& f : starts) {
    late += f.pass ? 0 : 1;
    if (f.firstPlayout)
      worst = std::max(worst, *f.firstPlayout - f.firstNotification);
  }

  std::set<std::string> leavers;
  ScenarioConfig stay = cfg;
  std::erase_if(stay.script, [&leavers] (const ScriptEvent& ev) {
    if (ev.kind != ScriptEventKind::leave)
      return false;
    leavers.insert(ev.ue);
    return true;
  });
  REQUIRE_FALSE(leavers.empty());
  const auto baseline = runScenario(stay);

  std::map<std::pair<std::string, ProducerKey>, const StreamQuality*> without;
  const auto withoutLeave = computeQuality(baseline);
  for (const auto& q : withoutLeave)
    without[{q.consumer, q.producer}] = &q;

  std::size_t compared = 0;
  std::size_t perturbed = 0;
  for (const auto& q : computeQuality(run)) {
    if (leavers.contains(q.consumer) || leavers.contains(q.producer.ue))
      continue;
    auto it = without.find({q.consumer, q.producer});
    ++compared;
    if (it == without.end() || it->second->usableFrames != q.usableFrames || it->second->total != q.total)
      ++perturbed;
  }

  const bool pass = !starts.empty() && late == 0 && compared > 0 && perturbed == 0;
  CHECK(report(9, pass, fmt::format("{} joiner streams, {} late, slowest start {:.0f} ms after first notification "
                                    "(limit {:.0f}); {} unaffected streams compared, {} perturbed",
                                    starts.size(), late, worst, cfg.producer.theta + cfg.consumer.videoE2e,
                                    compared, perturbed)));
}
