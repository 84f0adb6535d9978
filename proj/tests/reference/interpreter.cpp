#include "interpreter.hpp"

#include <algorithm>
#include <cmath>

namespace ref {

// ---- Algorithm 1: content publish

std::vector<POut>
Producer::publish(Index i, std::uint32_t bytes)
{
  std::vector<POut> out;
  const std::uint32_t eps = (bytes + P.lChunk - 1) / P.lChunk;   // step 5
  content[i] = Stored{eps, {}};                                   // step 6
  bMax = i;                                                       // step 7
  published = true;

  if (i % (kNotify * P.sigma) == 0)                               // step 8
    out.push_back({POut::notify, 0, i});                          // step 9

  auto p = pending.find(i);                                       // steps 11-13
  if (p != pending.end()) {
    for (auto& [c, faces] : p->second) {
      if (c >= eps)
        continue;
      for (unsigned f : faces)
        send(i, c, f, out);
    }
    pending.erase(p);
  }
  windows();                                                      // steps 14-15
  return out;
}

// ---- Algorithm 2: Interest processing

std::vector<POut>
Producer::interest(Index frame, std::uint32_t chunk, unsigned face)
{
  std::vector<POut> out;
  if (published && frame < bMin)
    return out;

  const double nTheta = static_cast<double>(P.nTheta());
  if (published && frame <= bMax) {                               // steps 2-4
    if (chunk < content[frame].eps) {
      send(frame, chunk, face, out);
      windows();
    }
  }
  else {                                                          // steps 5-8
    const Index oldPMax = pMax;
    auto& faces = pending[frame][chunk];
    const bool fresh = std::find(faces.begin(), faces.end(), face) == faces.end();
    if (fresh)
      faces.push_back(face);

    bool fills = true;
    for (std::uint32_t c = 0; c < P.epsIr(frame); ++c)
      fills = fills && pending[frame].count(c) > 0;
    if (fills && frame > pMax)
      pMax = frame;

    if (static_cast<double>(std::max(pMax, frame) - bMax) > P.xi * nTheta) {   // steps 15-17
      if (fresh) {
        faces.pop_back();
        if (faces.empty())
          pending[frame].erase(chunk);
        if (pending[frame].empty())
          pending.erase(frame);
      }
      pMax = oldPMax;
      return out;
    }
    windows();
  }

  if (static_cast<double>(pMax - bMax) < P.omega * nTheta && kNotify > 1)     // steps 10-14
    kNotify = kNotify - 1;
  return out;
}

void
Producer::send(Index frame, std::uint32_t chunk, unsigned face, std::vector<POut>& out)
{
  Stored& s = content[frame];
  out.push_back({POut::data, face, frame, chunk, s.eps});
  s.sent.insert(chunk);
  if (s.sent.size() < s.eps)
    partial.insert(frame);
  else
    partial.erase(frame);
}

void
Producer::windows()
{
  Index open = pMax;
  if (!pending.empty())
    open = std::min(open, pending.begin()->first);
  if (!partial.empty())
    open = std::min(open, *partial.begin());
  pMin = open;

  if (!published)
    return;
  Index b = std::max(bMin, std::min(pMin, bMax - P.sigma + 1));
  b = std::max(b, bMax - P.nIBuf + 1);
  b = std::min(b, bMax);
  while (!content.empty() && content.begin()->first < b) {
    partial.erase(content.begin()->first);
    content.erase(content.begin());
  }
  bMin = b;
}

// ---- Algorithm 3: notification processing

std::vector<COut>
Consumer::notification(Index anchor, double now)
{
  std::vector<COut> out;
  if (lastAnchor && anchor < *lastAnchor)
    return out;
  lastAnchor = anchor;
  T = now;

  const Index nTheta = P.nTheta();
  if (!started) {                                                 // case 1
    started = true;
    rMin = anchor + nTheta;
    rMax = rMin + P.nRBuf;
    start(out);
  }
  else if (anchor > rMin + P.nRBuf) {                             // case 3
    rMin = anchor + nTheta;
    rMax = rMin + P.nRBuf;
  }
  else if (static_cast<double>(anchor) > static_cast<double>(rMin) + P.gamma * static_cast<double>(P.nRBuf)) {
    rMin = anchor + static_cast<Index>(std::floor(P.beta * static_cast<double>(nTheta)));    // case 2
    rMax = rMin + P.nRBuf;
  }
  return out;
}

// ---- Algorithm 4: pre-fetching

void
Consumer::ask(Index f, double tau, std::vector<COut>& out)
{
  Frame& fr = frames[f];
  fr.epsR = P.epsIr(f);
  lastTau = tau;
  out.push_back({COut::schedule, f, 0, tau});
  for (std::uint32_t c = 0; c < fr.epsR; ++c)
    out.push_back({COut::interest, f, c, 0.0});
}

void
Consumer::start(std::vector<COut>& out)
{
  frames.clear();
  double tau = T + P.theta + P.e2e - (P.dj + P.dec + P.rtt);      // Eq. 3
  for (Index f = rMin; f <= rMax; ++f) {
    if (f > rMin)
      tau = tau + P.tf();                                         // Eq. 4
    ask(f, tau, out);
  }
  k = rMax;
  rMinStar = rMin;
  rMaxStar = rMax;
}

std::vector<COut>
Consumer::tick()
{
  std::vector<COut> out;
  if (!started)
    return out;

  if (k == rMax) {                                                // steps 11-14
    if (rMax + 1 - rMin <= P.nRBuf) {
      k = k + 1;
      rMax = k;
      ask(k, lastTau + P.tf(), out);
    }
  }
  else if (k < rMax) {
    if (rMinStar < rMin && rMin <= rMaxStar) {                    // steps 15-20
      while (!frames.empty() && frames.begin()->first < rMin)
        frames.erase(frames.begin());
      for (auto it = frames.lower_bound(rMin); it != frames.end() && it->first <= rMaxStar; ++it) {
        if (it->second.done)
          continue;
        for (std::uint32_t c = 0; c < it->second.epsR; ++c)
          if (!it->second.got.count(c))
            out.push_back({COut::interest, it->first, c, 0.0});
      }
      for (Index f = rMaxStar + 1; f <= rMax; ++f)
        ask(f, lastTau + P.tf(), out);
      k = rMax;
    }
    else if (rMin > rMaxStar) {                                   // steps 21-22
      start(out);
    }
  }
  rMinStar = rMin;
  rMaxStar = rMax;
  return out;
}

// ---- Algorithm 5: content-object processing

std::vector<COut>
Consumer::content(Index i, std::uint32_t j, std::uint32_t eps)
{
  std::vector<COut> out;
  auto it = frames.find(i);
  if (!started || i < rMin || i > rMax || it == frames.end())
    return out;
  Frame& fr = it->second;
  if (fr.done || fr.got.count(j))
    return out;
  fr.got.insert(j);

  if (!fr.eps) {
    fr.eps = eps;
    if (eps > fr.epsR) {                                          // steps 5-7
      for (std::uint32_t c = fr.epsR; c < eps; ++c)
        out.push_back({COut::interest, i, c, 0.0});
    }
    fr.epsR = eps;                                                // steps 8-9
  }

  if (fr.got.size() >= *fr.eps) {                                 // steps 11-13
    fr.done = true;
    auto atMin = frames.find(rMin);
    if (i == rMin || (atMin != frames.end() && atMin->second.done)) {
      Index next = rMin;
      while (next < rMax) {
        auto f = frames.find(next);
        if (f == frames.end() || !f->second.done)
          break;
        next = next + 1;
      }
      rMin = next;
      while (!frames.empty() && frames.begin()->first < rMin)
        frames.erase(frames.begin());
    }
  }
  return out;
}

} // namespace ref
