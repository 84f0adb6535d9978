#include "srmca/media.hpp"

#include <doctest.h>

#include <sstream>

using namespace srmca;

namespace {

const ContentName VIDEO{"csr1", "conf42", "ueA", MediaType::video, 0, 0};
const ContentName AUDIO{"csr1", "conf42", "ueA", MediaType::audio, 0, 0};

EncodedFrame
sized(std::uint32_t bytes, FrameIndex index = 0)
{
  return EncodedFrame{index, index % 25 == 0 ? FrameType::key : FrameType::delta, bytes, 0.0};
}

} // namespace

TEST_SUITE("media") {

TEST_CASE("key frames sit on GOP boundaries")
{
  VideoModel m(VideoModelConfig{}, 1, 0);
  CHECK(m.frame(0).type == FrameType::key);
  CHECK(m.frame(25).type == FrameType::key);
  CHECK(m.frame(13).type == FrameType::delta);
  CHECK(m.frame(26).type == FrameType::delta);
}

TEST_CASE("video sizes are deterministic and within range")
{
  const VideoModelConfig cfg;
  VideoModel a(cfg, 9, 3);
  VideoModel b(cfg, 9, 3);
  VideoModel other(cfg, 10, 3);
  int differ = 0;
  for (FrameIndex i = 0; i < 500; ++i) {
    const auto f = a.frame(i);
    CHECK(f == b.frame(i));
    differ += f.size != other.frame(i).size;
    if (f.type == FrameType::key) {
      CHECK(f.size >= cfg.key.lo);
      CHECK(f.size <= cfg.key.hi);
    }
    else {
      CHECK(f.size >= cfg.delta.lo);
      CHECK(f.size <= cfg.oversize.hi);
    }
    CHECK(f.mediaTimestamp == doctest::Approx(40.0 * static_cast<double>(i)));
  }
  CHECK(differ > 400);

  // call order does not matter
  VideoModel seq(cfg, 9, 3);
  for (FrameIndex i = 0; i < 10; ++i)
    CHECK(seq.next() == a.frame(i));
}

TEST_CASE("audio is constant bit rate")
{
  AudioModel audio(30000.0, 20.0);
  CHECK(audio.payloadSize() == 75);
  const auto f0 = audio.frame(0);
  const auto f1 = audio.frame(1);
  CHECK(f0.size == f1.size);
  CHECK(f1.mediaTimestamp - f0.mediaTimestamp == doctest::Approx(20.0));
  CHECK(f0.type == FrameType::audio);
}

TEST_CASE("chunking")
{
  auto five = chunkFrame(sized(15000), 3000, VIDEO, 0.0);
  REQUIRE(five.size() == 5);
  for (const auto& d : five) {
    CHECK(d.payloadSize == 3000);
    CHECK(d.meta.totalChunks == 5);
  }

  auto two = chunkFrame(sized(3001), 3000, VIDEO, 0.0);
  REQUIRE(two.size() == 2);
  CHECK(two[0].payloadSize == 3000);
  CHECK(two[1].payloadSize == 1);
  CHECK(two[1].name.chunk == 1);

  CHECK(chunkFrame(sized(1), 3000, VIDEO, 0.0).size() == 1);
  CHECK(chunkFrame(sized(9000, 7), 3000, AUDIO, 5.0).size() == 1);
  CHECK(chunkFrame(sized(9000, 7), 3000, AUDIO, 5.0)[0].generationTime == 5.0);

  CHECK_THROWS_AS(chunkFrame(sized(0), 3000, VIDEO, 0.0), InvalidFrameError);
  CHECK(chunkCount(6000, 3000, MediaType::video) == 2);
  CHECK(chunkCount(6000, 3000, MediaType::text) == 1);
}

TEST_CASE("chunk sizes add up to the frame")
{
  for (std::uint32_t size = 1; size < 20000; size += 97) {
    std::uint32_t sum = 0;
    const auto chunks = chunkFrame(sized(size), 3000, VIDEO, 0.0);
    CHECK(chunks.size() == (size + 2999) / 3000);
    for (const auto& d : chunks)
      sum += d.payloadSize;
    CHECK(sum == size);
  }
}

TEST_CASE("frame trace round trip")
{
  VideoModel m(VideoModelConfig{}, 4, 0);
  std::vector<EncodedFrame> frames;
  for (FrameIndex i = 0; i < 60; ++i)
    frames.push_back(m.frame(i));
  std::stringstream ss;
  writeFrameTrace(ss, frames);
  const auto back = readFrameTrace(ss, 40.0);
  REQUIRE(back.size() == frames.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].index == frames[i].index);
    CHECK(back[i].type == frames[i].type);
    CHECK(back[i].size == frames[i].size);
  }

  std::istringstream bad("index,type,bytes\n0,key,abc\n");
  CHECK_THROWS_AS(readFrameTrace(bad, 40.0), std::runtime_error);
}

}
