#include "srmca/run.hpp"

#include <doctest.h>

#include <sstream>

using namespace srmca;

TEST_SUITE("simulator") {

TEST_CASE("events run in time order, ties by insertion")
{
  EventQueue q;
  std::vector<int> order;
  q.schedule(5.0, [&] { order.push_back(3); });
  q.schedule(1.0, [&] { order.push_back(1); });
  q.schedule(5.0, [&] { order.push_back(4); });
  q.schedule(2.0, [&] {
    order.push_back(2);
    q.schedule(5.0, [&] { order.push_back(5); });
  });
  q.schedule(9.0, [&] { order.push_back(6); });
  CHECK(q.runUntil(5.0) == 5);
  CHECK(order == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(q.now() == 5.0);
  CHECK(q.size() == 1);
  q.runUntil(100.0);
  CHECK(q.empty());
}

TEST_CASE("link delay is propagation plus serialization")
{
  Link l{40.0, 1e8};
  REQUIRE(l.transmit(3000, 0.0));
  CHECK(*l.transmit(3000, 100.0) == doctest::Approx(140.24));

  Link ctl{40.0, 1e8};
  CHECK(*ctl.transmit(0, 10.0) == doctest::Approx(50.0));

  Link down{40.0, 1e8};
  down.up = false;
  CHECK_FALSE(down.transmit(100, 0.0));
}

TEST_CASE("link is FIFO per direction")
{
  Link l{10.0, 8e3}; // 1 byte per ms
  const auto a = *l.transmit(100, 0.0);
  const auto b = *l.transmit(1, 0.0);
  CHECK(a == doctest::Approx(110.0));
  CHECK(b == doctest::Approx(111.0));
  CHECK(b > a);
}

TEST_CASE("two participants reach steady play-out")
{
  auto cfg = preset("baseline-3p");
  cfg.topology.ues = 2;
  cfg.duration = 10000.0;
  cfg.script.pop_back();
  const auto run = runScenario(cfg);
  for (const auto& q : computeQuality(run))
    CHECK(q.qualityPct() == 100.0);
}

TEST_CASE("same seed, same digest")
{
  auto cfg = preset("baseline-3p");
  cfg.duration = 6000.0;
  const auto a = runScenario(cfg);
  const auto b = runScenario(cfg);
  CHECK(a.trace->digestHex() == b.trace->digestHex());
  cfg.seed = 2;
  CHECK(runScenario(cfg).trace->digestHex() != a.trace->digestHex());
}

TEST_CASE("invalid scenario is rejected before running")
{
  auto cfg = preset("baseline-3p");
  cfg.script.push_back({1000.0, ScriptEventKind::leave, "ue9", ""});
  CHECK_THROWS_AS(runScenario(cfg), ConfigError);
}

TEST_CASE("link latencies are drawn in the configured range")
{
  const auto run = runScenario([] {
    auto cfg = preset("baseline-6p");
    cfg.duration = 2000.0;
    return cfg;
  }());
  int up = 0;
  for (const auto& [dir, ms] : run.linkLatency) {
    if (dir.first.starts_with("ue")) {
      CHECK(ms >= 30.0);
      CHECK(ms <= 50.0);
      ++up;
    }
  }
  CHECK(up == 6);
}

TEST_CASE("a leaver sends no Interests after leaving")
{
  auto cfg = preset("baseline-3p");
  cfg.duration = 8000.0;
  cfg.script.push_back({4000.0, ScriptEventKind::leave, "ue3", ""});
  const auto run = runScenario(cfg);
  const auto& out = run.trace->nodeBytes().at("ue3").out;
  CHECK(out.sum(0.0, 4000.0, PacketKind::interest, Trace::BIN_MS) > 0);
  CHECK(out.sum(4000.0 + Trace::BIN_MS, cfg.duration, PacketKind::interest, Trace::BIN_MS) == 0);

  // a second leave is a no-op
  cfg.script.push_back({5000.0, ScriptEventKind::leave, "ue3", ""});
  CHECK_NOTHROW(runScenario(cfg));
}

TEST_CASE("participant sweeps keep consumers of fan-in shapes")
{
  const auto base = preset("fanin-19p");
  const auto cfg = withParticipants(base, 28);
  CHECK(cfg.topology.ues == 28);
  CHECK(cfg.topology.consumers == base.topology.consumers);
  CHECK(cfg.topology.producers.size() == 27);
  CHECK(validate(cfg).empty());

  const auto small = withParticipants(preset("baseline-15p"), 3);
  CHECK(small.topology.ues == 3);
  CHECK(small.script.size() == 3);
  CHECK(validate(small).empty());
}

}
