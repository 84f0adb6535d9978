#include "srmca/sync.hpp"

#include <doctest.h>

#include <random>

using namespace srmca;

namespace {

ContentName
videoChunk(std::uint64_t frame)
{
  return ContentName{"csr1", "conf42", "ueA", MediaType::video, frame, 0};
}

Notification
note(std::uint64_t index, FrameIndex anchor, const std::string& ue = "ueA", const std::string& conf = "conf42")
{
  return Notification{index, Fingerprint{conf, ue, MediaType::video, anchor}, 0.0};
}

std::size_t
count(const std::vector<SyncAction>& actions, SyncActionKind kind)
{
  return static_cast<std::size_t>(
    std::count_if(actions.begin(), actions.end(), [kind] (const auto& a) { return a.kind == kind; }));
}

std::vector<std::string>
targets(const std::vector<SyncAction>& actions, SyncActionKind kind)
{
  std::vector<std::string> out;
  for (const auto& a : actions)
    if (a.kind == kind)
      out.push_back(a.target);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_SUITE("sync") {

TEST_CASE("fingerprint anchors at the key frame")
{
  CHECK(deriveFingerprint(videoChunk(100), 25).anchor == 100);
  CHECK(deriveFingerprint(videoChunk(113), 25).anchor == 25 * (113 / 25));
  CHECK(deriveFingerprint(videoChunk(0), 25).anchor == 0);
  CHECK(keyFrameIndex(49, 25) == 25);
  CHECK(keyFrameIndex(50, 25) == 50);

  const auto fp = deriveFingerprint(videoChunk(113), 25);
  CHECK(fp.conf == "conf42");
  CHECK(fp.ue == "ueA");
  CHECK(fp.media == MediaType::video);
}

TEST_CASE("notification names are a different name class")
{
  NotificationName nn{"csr1", "sfid", Fingerprint{"conf42", "ueA", MediaType::video, 100}};
  const Name n = nn.toName();
  CHECK(n.size() == 3);
  CHECK(classifyName(n) == NameClass::notification);
  CHECK(classifyName(videoChunk(3).toName()) == NameClass::data);
  CHECK(NotificationName::fromName(n) == nn);
  CHECK(Fingerprint::parseComponent(nn.fingerprint.toComponent()) == nn.fingerprint);
  CHECK_THROWS_AS(deriveFingerprint(n, 25), WrongNameClassError);
  CHECK(deriveFingerprint(videoChunk(60).toName(), 25).anchor == 50);
}

TEST_CASE("agent registration is idempotent")
{
  SyncProxy proxy("csr1", {"conf42"});
  auto first = proxy.registerAgent("conf42", "ueA", true);
  CHECK(count(first, SyncActionKind::controllerEvent) == 1);
  CHECK(count(first, SyncActionKind::membership) == 1);
  REQUIRE(proxy.members("conf42").size() == 1);
  CHECK(proxy.members("conf42").contains("ueA"));

  auto again = proxy.registerAgent("conf42", "ueA", true);
  CHECK(count(again, SyncActionKind::controllerEvent) == 0);
  CHECK(proxy.members("conf42").size() == 1);

  CHECK_THROWS_AS(proxy.registerAgent("conf7", "ueA", true), SessionNotProvisionedError);
}

TEST_CASE("registration replays the latest notification of other producers")
{
  SyncProxy proxy("csr1", {"conf42"});
  proxy.registerAgent("conf42", "ueA", false);
  proxy.onAgentNotify(note(1, 0));
  proxy.onAgentNotify(note(2, 25));
  auto actions = proxy.registerAgent("conf42", "ueB", true);
  REQUIRE(count(actions, SyncActionKind::toAgent) == 1);
  auto it = std::find_if(actions.begin(), actions.end(),
                         [] (const auto& a) { return a.kind == SyncActionKind::toAgent; });
  CHECK(it->target == "ueB");
  CHECK(it->notification.index == 2);
}

TEST_CASE("proxy forwards fresh notifications once and drops stale ones")
{
  SyncProxy proxy("csr1", {"conf42"});
  proxy.registerAgent("conf42", "ueA", true);
  proxy.registerAgent("conf42", "ueB", true);

  auto fresh = proxy.onAgentNotify(note(1, 0));
  CHECK(count(fresh, SyncActionKind::toManager) == 1);
  CHECK(targets(fresh, SyncActionKind::toAgent) == std::vector<std::string>{"ueB"});

  auto stale = proxy.onAgentNotify(note(1, 0));
  REQUIRE(stale.size() == 1);
  CHECK(stale[0].kind == SyncActionKind::dropStale);
  CHECK(proxy.staleDropped() == 1);
}

TEST_CASE("producer-only proxy still forwards to the manager")
{
  SyncProxy proxy("csr1", {"conf42"});
  proxy.registerAgent("conf42", "ueA", false);
  auto actions = proxy.onAgentNotify(note(1, 0));
  CHECK(count(actions, SyncActionKind::toManager) == 1);
  CHECK(count(actions, SyncActionKind::toAgent) == 0);
}

TEST_CASE("manager relays to every other interested proxy")
{
  SyncManager mgr;
  for (auto p : {"proxy1", "proxy2", "proxy3", "proxy4"})
    mgr.addProxy(p);
  mgr.onMembership("proxy1", "conf42", true, true);
  mgr.onMembership("proxy2", "conf42", true, true);
  mgr.onMembership("proxy3", "conf42", true, true);
  mgr.onMembership("proxy4", "conf42", true, false);

  auto actions = mgr.relay(note(1, 0), "proxy1");
  CHECK(targets(actions, SyncActionKind::toProxy) == std::vector<std::string>{"proxy2", "proxy3"});

  CHECK_THROWS_AS(mgr.relay(note(2, 25), "proxy9"), UnknownSourceError);
}

TEST_CASE("single-proxy session has no fan-out")
{
  SyncManager mgr;
  mgr.addProxy("proxy1");
  mgr.onMembership("proxy1", "conf42", true, true);
  CHECK(count(mgr.relay(note(1, 0), "proxy1"), SyncActionKind::toProxy) == 0);
}

TEST_CASE("interested proxy joining late gets the latest state")
{
  SyncManager mgr;
  mgr.addProxy("proxy1");
  mgr.addProxy("proxy2");
  mgr.onMembership("proxy1", "conf42", true, false);
  mgr.relay(note(1, 0), "proxy1");
  mgr.relay(note(2, 25), "proxy1");
  auto actions = mgr.onMembership("proxy2", "conf42", true, true);
  REQUIRE(count(actions, SyncActionKind::toProxy) == 1);
  CHECK(actions[0].notification.index == 2);
}

TEST_CASE("history keeps the latest entry")
{
  NotificationHistory h(3);
  for (std::uint64_t i = 1; i <= 4; ++i)
    CHECK(h.append(note(i, static_cast<FrameIndex>(25 * i))));
  const ProducerKey key{"ueA", MediaType::video};
  REQUIRE(h.latest("conf42", key));
  CHECK(h.latest("conf42", key)->index == 4);
  CHECK(h.size("conf42", key) == 3);
  CHECK_FALSE(h.latest("conf42", ProducerKey{"ueZ", MediaType::video}));
  CHECK_FALSE(h.latest("conf9", key));
  CHECK_FALSE(h.append(note(3, 75)));
}

TEST_CASE("agent delivers non-decreasing anchors")
{
  SyncAgent agent("ueB", "csr1");
  CHECK(agent.accept(note(1, 25)));
  CHECK_FALSE(agent.accept(note(2, 25)));
  CHECK_FALSE(agent.accept(note(3, 0)));
  CHECK(agent.accept(note(4, 50)));
  CHECK(agent.lastAnchor(ProducerKey{"ueA", MediaType::video}) == 50);
  CHECK(agent.accept(note(1, 0, "ueC")));
}

TEST_CASE("each other member proxy receives exactly one copy")
{
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int nProxies = 1 + static_cast<int>(rng() % 6);
    SyncManager mgr;
    std::set<std::string> interested;
    for (int p = 0; p < nProxies; ++p) {
      const std::string id = "p" + std::to_string(p);
      mgr.addProxy(id);
      const bool want = rng() % 3 != 0;
      mgr.onMembership(id, "conf42", true, want);
      if (want)
        interested.insert(id);
    }
    std::map<std::string, int> received;
    std::uint64_t index = 0;
    int expected = 0;
    for (int k = 0; k < 20; ++k) {
      const std::string from = "p" + std::to_string(rng() % nProxies);
      ++index;
      for (const auto& a : mgr.relay(note(index, static_cast<FrameIndex>(25 * index)), from))
        ++received[a.target];
      expected += static_cast<int>(interested.size()) - (interested.contains(from) ? 1 : 0);
    }
    int total = 0;
    for (const auto& [p, c] : received) {
      CHECK(interested.contains(p));
      total += c;
    }
    CHECK(total == expected);
  }
}

}
