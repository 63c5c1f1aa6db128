#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <functional>

#include "doctest.h"
#include "support/temp_dir.hpp"
#include "v2r/batch_queue.hpp"
#include "v2r/preprocess.hpp"
#include "v2r/rng.hpp"
#include "v2r/shot_detect.hpp"
#include "v2r/synth.hpp"

using namespace v2r;
using v2r::test::TempDir;

namespace {

FrameStream tiny_gray(uint32_t frames, uint32_t w = 2, uint32_t h = 2) {
  FrameStream s;
  s.width = w;
  s.height = h;
  s.channels = 1;
  s.pix_fmt = PixFmt::gray8;
  s.frame_count = frames;
  s.payload.assign(s.frame_bytes() * frames, 0);
  return s;
}

// black / white / black thirds
FrameStream bwb_stream(uint32_t per_shot = 30) {
  FrameStream s = tiny_gray(per_shot * 3, 4, 4);
  for (uint32_t f = per_shot; f < 2 * per_shot; ++f)
    for (auto& px : s.frame(f)) px = 255;
  return s;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ok;
}

}  // namespace

TEST_CASE("hyf: header arithmetic on a tiny file") {
  TempDir dir;
  FrameStream s = tiny_gray(3);
  for (uint32_t f = 0; f < 3; ++f)
    for (auto& px : s.frame(f)) px = static_cast<uint8_t>(f * 10);
  write_stream(dir.file("t.hyf"), s);

  FrameStream back = read_stream(dir.file("t.hyf"));
  CHECK(back.width == 2);
  CHECK(back.height == 2);
  CHECK(back.frame_count == 3);
  REQUIRE(back.frame(2).size() == 4);
  CHECK(back.frame(2)[0] == 20);
}

TEST_CASE("hyf: 1000-frame round trip is byte-identical") {
  TempDir dir;
  FrameStream s = make_random_stream(1000, 16, 9, 42);
  write_stream(dir.file("big.hyf"), s);
  FrameStream back = read_stream(dir.file("big.hyf"));
  CHECK(back.payload == s.payload);
  CHECK(back.fps_num == s.fps_num);
  CHECK(back.frame_count == 1000);
}

TEST_CASE("hyf: error taxonomy") {
  TempDir dir;

  {
    std::ofstream out(dir.file("bad.hyf"), std::ios::binary);
    out << "NOPExxxxxxxxxxxxxxxxxxxxxxxxxxxx";
  }
  CHECK(code_of([&] { read_stream(dir.file("bad.hyf")); }) == Errc::bad_magic);

  FrameStream s = tiny_gray(3);
  write_stream(dir.file("trunc.hyf"), s);
  auto size = std::filesystem::file_size(dir.file("trunc.hyf"));
  std::filesystem::resize_file(dir.file("trunc.hyf"), size - 2);  // cut into frame 2
  CHECK(code_of([&] { read_stream(dir.file("trunc.hyf")); }) == Errc::truncated_stream);
  try {
    read_stream(dir.file("trunc.hyf"));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("frame 2") != std::string::npos);
  }

  write_stream(dir.file("ver.hyf"), s);
  {
    std::fstream f(dir.file("ver.hyf"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    char v2[2] = {2, 0};
    f.write(v2, 2);
  }
  CHECK(code_of([&] { read_stream(dir.file("ver.hyf")); }) == Errc::unsupported_version);

  CHECK(code_of([&] { read_stream(dir.file("missing.hyf")); }) == Errc::io_error);
}

TEST_CASE("shots: identical frames form exactly one shot with keyframe 0") {
  FrameStream s = tiny_gray(100);
  auto shots = detect_shots(s, 0.35f, 2);
  REQUIRE(shots.size() == 1);
  CHECK(shots[0] == Shot{0, 99, 0});
}

TEST_CASE("shots: black/white/black cuts at 30 and 60") {
  FrameStream s = bwb_stream(30);
  auto d = frame_distances(s);
  REQUIRE(d.size() == 89);
  CHECK(d[29] == doctest::Approx(2.0f));  // cut into white
  CHECK(d[59] == doctest::Approx(2.0f));  // cut back to black
  CHECK(d[10] == 0.0f);

  auto shots = detect_shots(s, 0.35f, 2);
  REQUIRE(shots.size() == 3);
  CHECK(shots[0] == Shot{0, 29, 0});
  CHECK(shots[1] == Shot{30, 59, 30});
  CHECK(shots[2] == Shot{60, 89, 60});
}

TEST_CASE("shots: min_shot_len suppresses early boundaries") {
  FrameStream s = tiny_gray(2);
  for (auto& px : s.frame(1)) px = 255;
  auto shots = detect_shots(s, 0.35f, 5);
  REQUIRE(shots.size() == 1);
  CHECK(shots[0] == Shot{0, 1, 0});
}

TEST_CASE("shots: partition property on random synthetic streams") {
  SplitMix64 g(9);
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t frames = 1 + static_cast<uint32_t>(g.next_below(200));
    uint32_t shots_requested = 1 + static_cast<uint32_t>(g.next_below(std::min(frames, 12u)));
    FrameStream s = make_shot_stream(frames, shots_requested, 8, 8, g.next());
    auto shots = detect_shots(s, 0.35f, 1);

    CHECK(shots.front().start_frame == 0);
    CHECK(shots.back().end_frame == frames - 1);
    for (size_t i = 0; i < shots.size(); ++i) {
      CHECK(shots[i].start_frame <= shots[i].keyframe);
      CHECK(shots[i].keyframe <= shots[i].end_frame);
      if (i > 0) CHECK(shots[i].start_frame == shots[i - 1].end_frame + 1);
    }
    CHECK(shots.size() <= frames);
  }
}

TEST_CASE("shot detection parameter validation") {
  FrameStream s = tiny_gray(4);
  CHECK_THROWS_AS(detect_shots(s, 0.0f, 2), Error);
  CHECK_THROWS_AS(detect_shots(s, 2.5f, 2), Error);
  CHECK_THROWS_AS(detect_shots(s, 0.35f, 0), Error);
  FrameStream empty = tiny_gray(0);
  CHECK(code_of([&] { detect_shots(empty, 0.35f, 2); }) == Errc::empty_stream);
}

TEST_CASE("preprocess_image: identity resize scales u8 to [0,1]") {
  std::vector<uint8_t> px = {0, 51, 102, 255};
  Tensor t = preprocess_image(px, 2, 2, 1, 2, 2);
  CHECK(t.dtype == Dtype::f32);
  auto v = t.f32();
  CHECK(v[0] == 0.0f);
  CHECK(v[1] == doctest::Approx(51.0f / 255.0f));
  CHECK(v[3] == 1.0f);
}

TEST_CASE("preprocess_image: 4x4 -> 2x2 picks source rows/cols {1,3}") {
  // value = 16*row + col so picks are recognizable
  std::vector<uint8_t> px(16);
  for (uint32_t r = 0; r < 4; ++r)
    for (uint32_t c = 0; c < 4; ++c) px[r * 4 + c] = static_cast<uint8_t>(16 * r + c);
  Tensor t = resize_u8(px, 4, 4, 1, 2, 2);
  auto v = t.u8();
  CHECK(v[0] == 16 * 1 + 1);
  CHECK(v[1] == 16 * 1 + 3);
  CHECK(v[2] == 16 * 3 + 1);
  CHECK(v[3] == 16 * 3 + 3);
}

TEST_CASE("preprocess_image: all-255 becomes all-1.0 at any target size") {
  std::vector<uint8_t> px(5 * 7 * 3, 255);
  Tensor t = preprocess_image(px, 5, 7, 3, 3, 2);
  for (float v : t.f32()) CHECK(v == 1.0f);
}

TEST_CASE("preprocess_text: srt fixture tokenizes to the hand reference") {
  CHECK(preprocess_text("1\n00:00:01,000 --> 00:00:02,000\nHello, World!") ==
        std::vector<std::string>{"hello", "world"});
  CHECK(preprocess_text("").empty());

  std::string srt =
      "1\r\n00:00:01,000 --> 00:00:02,500\r\nWe choose to go!\r\n\r\n"
      "2\r\n00:00:03,000 --> 00:00:04,000\r\n\"Not because\" it's EASY...\r\n\r\n"
      "3\r\n00:00:05,100 --> 00:00:06,900\r\nbut because it is hard-ish.\r\n";
  CHECK(preprocess_text(srt) ==
        std::vector<std::string>{"we", "choose", "to", "go", "not", "because", "it's", "easy",
                                 "but", "because", "it", "is", "hard-ish"});
}

TEST_CASE("batch queue: size trigger emits exactly the planned batch") {
  ManualClock clock;
  BatchingEngine engine(&clock);
  engine.open_queue("m", TensorSpec::scalar_batch(Dtype::f32), 4);

  std::vector<InferenceBatch> emitted;
  for (int i = 0; i < 4; ++i) {
    InferenceRequest req;
    req.request_id = engine.next_request_id();
    req.model_id = "m";
    req.payload = Tensor::zeros(Dtype::f32, {1});
    auto got = engine.submit(std::move(req));
    for (auto& b : got) emitted.push_back(std::move(b));
  }
  REQUIRE(emitted.size() == 1);
  CHECK(emitted[0].trigger == BatchTrigger::size);
  CHECK(emitted[0].requests.size() == 4);
  // FIFO by submission
  for (size_t i = 1; i < 4; ++i)
    CHECK(emitted[0].requests[i].request_id > emitted[0].requests[i - 1].request_id);
}

TEST_CASE("batch queue: timeout trigger with mock clock, zero slack") {
  ManualClock clock;
  BatchingEngine engine(&clock);
  engine.open_queue("m", TensorSpec::scalar_batch(Dtype::f32), 8);

  for (int i = 0; i < 3; ++i) {
    InferenceRequest req;
    req.request_id = engine.next_request_id();
    req.model_id = "m";
    req.payload = Tensor::zeros(Dtype::f32, {1});
    req.deadline_ms = 20.0f;
    CHECK(engine.submit(std::move(req)).empty());
  }

  clock.advance(19.999);
  CHECK(engine.tick().empty());
  clock.advance(0.001);
  auto batches = engine.tick();
  REQUIRE(batches.size() == 1);
  CHECK(batches[0].trigger == BatchTrigger::timeout);
  CHECK(batches[0].requests.size() == 3);
  for (const auto& r : batches[0].requests)
    CHECK(clock.now_ms() - r.enqueued_at <= r.deadline_ms + 0.0);
}

TEST_CASE("batch queue: plan switch 8 -> 4 bounds later batches") {
  ManualClock clock;
  BatchingEngine engine(&clock);
  engine.open_queue("m", TensorSpec::scalar_batch(Dtype::f32), 8);

  auto submit_n = [&](int n) {
    std::vector<InferenceBatch> out;
    for (int i = 0; i < n; ++i) {
      InferenceRequest req;
      req.request_id = engine.next_request_id();
      req.model_id = "m";
      req.payload = Tensor::zeros(Dtype::f32, {1});
      for (auto& b : engine.submit(std::move(req))) out.push_back(std::move(b));
    }
    return out;
  };

  auto first = submit_n(8);
  REQUIRE(first.size() == 1);
  CHECK(first[0].requests.size() == 8);

  engine.set_batch_size("m", 4);
  auto later = submit_n(10);
  for (const auto& b : later) CHECK(b.requests.size() <= 4);
  auto rest = engine.drain("m");
  for (const auto& b : rest) {
    CHECK(b.requests.size() <= 4);
    CHECK(b.trigger == BatchTrigger::drain);
  }
}

TEST_CASE("batch queue: drain flushes the remainder, close rejects submits") {
  ManualClock clock;
  BatchingEngine engine(&clock);
  engine.open_queue("m", TensorSpec::scalar_batch(Dtype::f32), 4);

  InferenceRequest req;
  req.request_id = 1;
  req.model_id = "m";
  req.payload = Tensor::zeros(Dtype::f32, {1});
  engine.submit(std::move(req));
  auto drained = engine.drain("m");
  REQUIRE(drained.size() == 1);
  CHECK(drained[0].requests.size() == 1);
  CHECK(drained[0].trigger == BatchTrigger::drain);

  engine.close("m");
  InferenceRequest after;
  after.request_id = 2;
  after.model_id = "m";
  after.payload = Tensor::zeros(Dtype::f32, {1});
  CHECK(code_of([&] { engine.submit(std::move(after)); }) == Errc::queue_closed);
}

TEST_CASE("batch queue: real-clock timeout emits within the slack budget") {
  BatchingEngine engine;  // steady clock
  engine.open_queue("m", TensorSpec::scalar_batch(Dtype::f32), 8);
  InferenceRequest req;
  req.request_id = 1;
  req.model_id = "m";
  req.payload = Tensor::zeros(Dtype::f32, {1});
  req.deadline_ms = 20.0f;
  CHECK(engine.submit(std::move(req)).empty());

  std::vector<InferenceBatch> got;
  for (int i = 0; i < 400 && got.empty(); ++i) {
    std::this_thread::sleep_for(std::chrono::microseconds(200));
    got = engine.tick();
  }
  REQUIRE(got.size() == 1);
  CHECK(got[0].trigger == BatchTrigger::timeout);
  double wait = got[0].formed_at - got[0].requests[0].enqueued_at;
  CHECK(wait >= 20.0);
  CHECK(wait <= 20.0 + 5.0);  // slack budget on an idle machine
}

TEST_CASE("batch queue: unknown queue and payload mismatch") {
  BatchingEngine engine;
  InferenceRequest req;
  req.model_id = "ghost";
  req.payload = Tensor::zeros(Dtype::f32, {1});
  CHECK(code_of([&] { engine.submit(std::move(req)); }) == Errc::unknown_model_queue);

  engine.open_queue("m", TensorSpec::parse("u8:batch,4,4,3"), 4);
  InferenceRequest wrong;
  wrong.model_id = "m";
  wrong.payload = Tensor::zeros(Dtype::f32, {1});
  CHECK(code_of([&] { engine.submit(std::move(wrong)); }) == Errc::payload_mismatch);
}
