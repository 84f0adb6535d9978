// Straight-line transcription of the producer (Alg. 1-2) and consumer
// (Alg. 3-5) pseudo code, kept independent of the library so the two can be
// run side by side. Only video streams are modeled.

#ifndef SRMCA_TESTS_REFERENCE_INTERPRETER_HPP
#define SRMCA_TESTS_REFERENCE_INTERPRETER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace ref {

using Index = std::int64_t;

struct Params
{
  double fps = 25.0;
  Index sigma = 25;
  Index kNotify = 1;
  std::uint32_t lChunk = 3000;
  Index nIBuf = 100;
  double theta = 1000.0;
  double omega = 0.5;
  double xi = 6.0;
  std::uint32_t epsKey = 5;
  std::uint32_t epsDelta = 1;

  Index nRBuf = 100;
  double dj = 40.0;
  double dec = 10.0;
  double e2e = 250.0;
  double rtt = 80.0;
  double beta = 0.5;
  double gamma = 0.5;

  double tf() const { return 1000.0 / fps; }
  Index nTheta() const { return static_cast<Index>(theta * fps / 1000.0 + 0.5); }
  std::uint32_t epsIr(Index k) const { return k % sigma == 0 ? epsKey : epsDelta; }
};

/// What the producer hands to the network.
struct POut
{
  enum Kind { data, notify } kind;
  unsigned face = 0;
  Index frame = 0;
  std::uint32_t chunk = 0;
  std::uint32_t total = 0;
};

struct Producer
{
  explicit Producer(const Params& p) : P(p), kNotify(p.kNotify) {}

  std::vector<POut> publish(Index i, std::uint32_t bytes);
  std::vector<POut> interest(Index frame, std::uint32_t chunk, unsigned face);

  Params P;
  Index kNotify;
  bool published = false;
  Index bMin = 0, bMax = 0, pMin = 0, pMax = 0;

  struct Stored { std::uint32_t eps; std::set<std::uint32_t> sent; };
  std::map<Index, Stored> content;
  std::map<Index, std::map<std::uint32_t, std::vector<unsigned>>> pending;
  std::set<Index> partial;

private:
  void send(Index frame, std::uint32_t chunk, unsigned face, std::vector<POut>& out);
  void windows();
};

/// What the consumer hands to the network, plus play-out schedule entries.
struct COut
{
  enum Kind { interest, schedule } kind;
  Index frame = 0;
  std::uint32_t chunk = 0;
  double tau = 0.0;
};

struct Consumer
{
  explicit Consumer(const Params& p) : P(p) {}

  std::vector<COut> notification(Index anchor, double now);
  std::vector<COut> tick();
  std::vector<COut> content(Index i, std::uint32_t j, std::uint32_t eps);

  Params P;
  bool started = false;
  Index rMin = 0, rMax = 0, rMinStar = 0, rMaxStar = 0, k = 0;
  double T = 0.0, lastTau = 0.0;
  std::optional<Index> lastAnchor;

  struct Frame
  {
    std::uint32_t epsR = 0;
    std::optional<std::uint32_t> eps;
    std::set<std::uint32_t> got;
    bool done = false;
  };
  std::map<Index, Frame> frames;

private:
  void ask(Index f, double tau, std::vector<COut>& out);
  void start(std::vector<COut>& out);
};

} // namespace ref

#endif
