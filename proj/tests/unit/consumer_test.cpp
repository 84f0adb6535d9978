#include "srmca/consumer.hpp"

#include <doctest.h>

#include <random>

using namespace srmca;

namespace {

Notification
note(FrameIndex anchor, std::uint64_t index = 1)
{
  return Notification{index, Fingerprint{"conf42", "ueA", MediaType::video, anchor}, 0.0};
}

DataObject
chunkOf(FrameIndex frame, std::uint32_t chunk, std::uint32_t total)
{
  DataObject d;
  d.name = ContentName{"csr1", "conf42", "ueA", MediaType::video, static_cast<std::uint64_t>(frame), chunk};
  d.payloadSize = 1000;
  d.meta.frameIndex = frame;
  d.meta.totalChunks = total;
  return d;
}

std::vector<ConsumerAction>
only(const std::vector<ConsumerAction>& actions, ConsumerActionKind kind)
{
  std::vector<ConsumerAction> out;
  std::copy_if(actions.begin(), actions.end(), std::back_inserter(out), [kind] (const auto& a) { return a.kind == kind; });
  return out;
}

std::set<FrameIndex>
framesOf(const std::vector<ConsumerAction>& actions)
{
  std::set<FrameIndex> out;
  for (const auto& a : actions)
    out.insert(a.frame);
  return out;
}

std::set<FrameIndex>
range(FrameIndex lo, FrameIndex hi)
{
  std::set<FrameIndex> out;
  for (FrameIndex k = lo; k <= hi; ++k)
    out.insert(k);
  return out;
}

} // namespace

TEST_SUITE("consumer") {

TEST_CASE("play-out time of the first frame")
{
  CHECK(firstPlayoutTime(0.0, 1000.0, 250.0, 40.0, 10.0, 80.0) == doctest::Approx(1120.0));
  CHECK(successorPlayoutTime(1120.0, 40.0) == doctest::Approx(1160.0));
  // zero lead and a budget that exactly covers the delays
  CHECK(firstPlayoutTime(500.0, 0.0, 40.0 + 10.0 + 80.0, 40.0, 10.0, 80.0) == doctest::Approx(500.0));

  const ConsumerConfig cfg;
  CHECK(computePlayoutTime(125, 100, 0.0, cfg) == doctest::Approx(1120.0));
  CHECK_THROWS_AS(computePlayoutTime(126, 100, 0.0, cfg), ContractViolation);
  CHECK(prefetchDelay(1000.0, 100, 25.0) == doctest::Approx(5000.0));
}

TEST_CASE("chunk estimates")
{
  const ConsumerConfig cfg;
  CHECK(estimateChunks(cfg, 50) == 5);
  CHECK(estimateChunks(cfg, 51) == 1);
  CHECK(estimateChunks(cfg, 0) == 5);
}

TEST_CASE("first notification opens the window and pre-fetches it")
{
  ConsumerStream c(ConsumerConfig{});
  auto actions = c.onNotification(note(100), 0.0);
  CHECK(c.rMin() == 125);
  CHECK(c.rMax() == 225);
  CHECK(framesOf(only(actions, ConsumerActionKind::schedule)) == range(125, 225));
  // key frames 125, 150, 175, 200, 225 ask for 5 chunks, the rest for 1
  CHECK(only(actions, ConsumerActionKind::interest).size() == 5 * 5 + 96);
  REQUIRE(c.playoutTime(125));
  CHECK(*c.playoutTime(125) == doctest::Approx(1120.0));
  CHECK(*c.playoutTime(126) == doctest::Approx(1160.0));
  CHECK(*c.playoutTime(225) == doctest::Approx(1120.0 + 100 * 40.0));
}

TEST_CASE("lag jump")
{
  ConsumerStream c(ConsumerConfig{});
  c.onNotification(note(100), 0.0);
  auto actions = c.onNotification(note(200, 2), 4000.0);
  CHECK(only(actions, ConsumerActionKind::jumpLag).size() == 1);
  CHECK(c.rMin() == 212);
  CHECK(c.rMax() == 312);
}

TEST_CASE("failure jump restarts the pre-fetch")
{
  ConsumerStream c(ConsumerConfig{});
  c.onNotification(note(100), 0.0);
  auto actions = c.onNotification(note(300, 2), 8000.0);
  CHECK(only(actions, ConsumerActionKind::jumpFail).size() == 1);
  CHECK(c.rMin() == 325);
  CHECK(c.rMax() == 425);

  auto tick = c.tick(8040.0);
  CHECK(only(tick, ConsumerActionKind::restart).size() == 1);
  CHECK(framesOf(only(tick, ConsumerActionKind::schedule)) == range(325, 425));
  CHECK(*c.playoutTime(325) == doctest::Approx(8000.0 + 1120.0));
  CHECK(c.openFrames() == 101);
}

TEST_CASE("notification inside the threshold leaves the window alone")
{
  ConsumerStream c(ConsumerConfig{});
  c.onNotification(note(100), 0.0);
  CHECK(c.onNotification(note(125, 2), 1000.0).empty());
  CHECK(c.rMin() == 125);
  c.onNotification(note(50, 3), 2000.0);
  CHECK(c.counters().staleNotifications == 1);
}

TEST_CASE("window jump discards below and extends above")
{
  ConsumerConfig cfg;
  cfg.beta = 0.4;
  ConsumerStream c(cfg);
  c.onNotification(note(100), 0.0);
  c.onNotification(note(200, 2), 4000.0);
  REQUIRE(c.rMin() == 210);
  REQUIRE(c.rMax() == 310);

  auto actions = c.tick(4040.0);
  const auto cancelled = framesOf(only(actions, ConsumerActionKind::cancel));
  CHECK(cancelled == range(125, 209));
  const auto scheduled = framesOf(only(actions, ConsumerActionKind::schedule));
  CHECK(scheduled == range(226, 310));
  CHECK(*c.playoutTime(226) == doctest::Approx(*c.playoutTime(225) + 40.0));
  CHECK(c.cursor() == 310);

  // chunk for a discarded frame
  CHECK(c.onData(chunkOf(150, 0, 1), 4100.0).empty());
  CHECK(c.counters().outOfWindow == 1);
}

TEST_CASE("steady tick advances one frame")
{
  ConsumerStream c(ConsumerConfig{});
  c.onNotification(note(100), 0.0);
  CHECK(c.tick(40.0).empty()); // window full

  // key frame 125 turns out to be one chunk: 4 Interests cancelled
  auto data = c.onData(chunkOf(125, 0, 1), 900.0);
  CHECK(only(data, ConsumerActionKind::cancel).size() == 4);
  CHECK(only(data, ConsumerActionKind::complete).size() == 1);
  CHECK(c.rMin() == 126);

  auto actions = c.tick(1000.0);
  const auto scheduled = only(actions, ConsumerActionKind::schedule);
  REQUIRE(scheduled.size() == 1);
  CHECK(scheduled[0].frame == 226);
  CHECK(scheduled[0].time == doctest::Approx(*c.playoutTime(225) + 40.0));
  CHECK(only(actions, ConsumerActionKind::interest).size() == 1);
  CHECK(c.rMax() == 226);
}

TEST_CASE("under-fetched frame requests the rest in one batch")
{
  ConsumerStream c(ConsumerConfig{});
  c.onNotification(note(100), 0.0);
  auto actions = c.onData(chunkOf(126, 0, 5), 900.0);
  const auto repairs = only(actions, ConsumerActionKind::repair);
  REQUIRE(repairs.size() == 4);
  for (std::uint32_t j = 0; j < 4; ++j)
    CHECK(repairs[j].chunk == j + 1);
  CHECK(c.counters().repairs == 4);

  for (std::uint32_t j = 1; j < 5; ++j)
    c.onData(chunkOf(126, j, 5), 1000.0);
  CHECK(c.onData(chunkOf(126, 2, 5), 1001.0).empty());
  CHECK(c.counters().duplicates == 1);
}

TEST_CASE("r_min advances past every complete frame")
{
  ConsumerStream c(ConsumerConfig{});
  c.onNotification(note(100), 0.0);
  for (FrameIndex k = 126; k < 130; ++k)
    c.onData(chunkOf(k, 0, 1), 500.0);
  CHECK(c.rMin() == 125);
  c.onData(chunkOf(125, 0, 1), 600.0);
  CHECK(c.rMin() == 130);
}

TEST_CASE("window stays bounded under random traffic")
{
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    ConsumerStream c(ConsumerConfig{});
    FrameIndex anchor = 25 * static_cast<FrameIndex>(rng() % 10);
    std::uint64_t index = 1;
    SimTime now = 0.0;
    c.onNotification(note(anchor, index), now);
    for (int step = 0; step < 600; ++step) {
      now += 40.0;
      const auto roll = rng() % 20;
      if (roll == 0) {
        anchor += 25 * static_cast<FrameIndex>(1 + rng() % 8);
        c.onNotification(note(anchor, ++index), now);
      }
      else if (roll < 12) {
        const FrameIndex k = c.rMin() + static_cast<FrameIndex>(rng() % 30);
        const std::uint32_t total = 1 + rng() % 4;
        c.onData(chunkOf(k, rng() % total, total), now);
      }
      else {
        const FrameIndex before = c.rMin();
        c.tick(now);
        CHECK(c.rMin() >= before);
      }
      CHECK(c.rMin() <= c.rMax());
      CHECK(c.rMax() - c.rMin() <= 100);
    }
  }
}

TEST_CASE("lip-sync gate")
{
  AvSync s;
  CHECK(s.offer(MediaType::audio, 1000.0));
  s.release(MediaType::video, 1000.0);
  CHECK(s.offer(MediaType::audio, 1000.0));
  CHECK_FALSE(s.offer(MediaType::audio, 1060.0));
  CHECK(s.offer(MediaType::audio, 1045.0));

  AvSync v;
  v.release(MediaType::audio, 1000.0);
  CHECK(v.offer(MediaType::video, 1100.0));
  CHECK_FALSE(v.offer(MediaType::video, 1130.0));
  CHECK(v.offer(MediaType::text, 99999.0));
}

}
