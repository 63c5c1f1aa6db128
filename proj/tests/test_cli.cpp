#define DOCTEST_CONFIG_IMPLEMENT
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support/temp_dir.hpp"
#include "v2r/errors.hpp"

using nlohmann::json;
using v2r::test::TempDir;

namespace {

std::string g_binary;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  TempDir io;
  auto out_path = io.file("out");
  auto err_path = io.file("err");
  std::string cmd = g_binary + " " + args + " >" + out_path.string() + " 2>" + err_path.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

}  // namespace

TEST_CASE("exit-code table is stable") {
  using v2r::Errc;
  using v2r::exit_code;
  CHECK(exit_code(Errc::ok) == 0);
  CHECK(exit_code(Errc::invalid_argument) == 2);
  CHECK(exit_code(Errc::not_found) == 3);
  CHECK(exit_code(Errc::no_profile) == 3);
  CHECK(exit_code(Errc::unknown_model) == 3);
  CHECK(exit_code(Errc::unknown_model_queue) == 3);
  CHECK(exit_code(Errc::invalid_manifest) == 4);
  CHECK(exit_code(Errc::invalid_record) == 4);
  CHECK(exit_code(Errc::shape_mismatch) == 4);
  CHECK(exit_code(Errc::payload_mismatch) == 4);
  CHECK(exit_code(Errc::bad_dimensions) == 4);
  CHECK(exit_code(Errc::dim_mismatch) == 4);
  CHECK(exit_code(Errc::duplicate_version) == 5);
  CHECK(exit_code(Errc::duplicate_id) == 5);
  CHECK(exit_code(Errc::storage_failure) == 6);
  CHECK(exit_code(Errc::io_error) == 6);
  CHECK(exit_code(Errc::corrupt_blob) == 7);
  CHECK(exit_code(Errc::bad_magic) == 7);
  CHECK(exit_code(Errc::truncated_stream) == 7);
  CHECK(exit_code(Errc::malformed_body) == 7);
  CHECK(exit_code(Errc::batch_too_large) == 8);
  CHECK(exit_code(Errc::queue_closed) == 8);
  CHECK(exit_code(Errc::bind_failure) == 9);
  CHECK(exit_code(Errc::executor_failure) == 10);
}

TEST_CASE("synth + ingest report the expected shots") {
  TempDir dir;
  auto stream = dir.file("s.hyf");
  auto made = run("synth --out " + stream.string() + " --frames 90 --shots 3 --width 16 --height 16");
  REQUIRE(made.exit_code == 0);
  CHECK(json::parse(made.out).at("frames") == 90);

  auto ingested = run("ingest --stream " + stream.string());
  REQUIRE(ingested.exit_code == 0);
  json report = json::parse(ingested.out);
  CHECK(report.at("frames") == 90);
  CHECK(report.at("shots").size() == 3);
  CHECK(report.at("shots")[1].at("keyframe") == 30);
}

TEST_CASE("missing stream file: nonzero exit, error on stderr") {
  auto r = run("ingest --stream /nonexistent/x.hyf");
  CHECK(r.exit_code == v2r::exit_code(v2r::Errc::io_error));
  CHECK(r.err.find("error") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("model register + list round trip through the CLI") {
  TempDir dir;
  auto root = dir.file("registry");
  auto reg = run("model register --root " + root.string() +
                 " --id prod-emb --task embedding --input-spec u8:batch,32,32,3 "
                 "--output-spec f32:64");
  REQUIRE(reg.exit_code == 0);
  json m = json::parse(reg.out);
  CHECK(m.at("version") == 1);
  CHECK(m.at("weight_ref") == "");

  auto listed = run("model list --root " + root.string());
  REQUIRE(listed.exit_code == 0);
  CHECK(json::parse(listed.out).size() == 1);

  auto bad = run("model register --root " + root.string() + " --id 'Bad Name!'");
  CHECK(bad.exit_code == v2r::exit_code(v2r::Errc::invalid_manifest));
}

TEST_CASE("pipeline end-to-end: index then self-match at rank 1") {
  TempDir dir;
  auto root = dir.file("registry");
  auto stream = dir.file("s.hyf");
  auto index = dir.file("p.hyix");

  REQUIRE(run("model register --root " + root.string() +
              " --id prod-emb --task embedding --input-spec u8:batch,32,32,3 "
              "--output-spec f32:64")
              .exit_code == 0);
  REQUIRE(run("synth --out " + stream.string() + " --frames 90 --shots 3 --width 32 --height 32")
              .exit_code == 0);

  auto indexed = run("pipeline --stream " + stream.string() + " --model prod-emb --root " +
                     root.string() + " --in-process --index " + index.string());
  REQUIRE(indexed.exit_code == 0);
  json report = json::parse(indexed.out);
  CHECK(report.at("shots").size() == 3);
  CHECK(report.at("features_indexed") == 3);
  CHECK(report.at("requests_submitted") == 3);

  // query with a frame inside shot 2 (not its keyframe)
  auto queried = run("pipeline --stream " + stream.string() + " --model prod-emb --root " +
                     root.string() + " --in-process --query --index " + index.string() +
                     " --query-frame 45 --k 3");
  REQUIRE(queried.exit_code == 0);
  json qreport = json::parse(queried.out);
  auto& neighbors = qreport.at("matches").at("neighbors");
  REQUIRE(neighbors.size() == 3);
  CHECK(neighbors[0].at("id") == 30);  // shot 2's keyframe
  CHECK(neighbors[0].at("score").get<double>() >= 0.99);
}

TEST_CASE("pipeline reports are seed-reproducible modulo timing fields") {
  TempDir dir;
  auto root = dir.file("registry");
  auto stream = dir.file("s.hyf");
  REQUIRE(run("model register --root " + root.string() +
              " --id m --task embedding --input-spec u8:batch,16,16,3 --output-spec f32:32")
              .exit_code == 0);
  REQUIRE(run("synth --out " + stream.string() + " --frames 40 --shots 2 --width 16 --height 16")
              .exit_code == 0);

  auto once = run("--seed 7 pipeline --stream " + stream.string() +
                  " --model m --root " + root.string() + " --in-process");
  auto twice = run("--seed 7 pipeline --stream " + stream.string() +
                   " --model m --root " + root.string() + " --in-process");
  REQUIRE(once.exit_code == 0);
  json a = json::parse(once.out);
  json b = json::parse(twice.out);
  a.erase("wall_ms");
  b.erase("wall_ms");
  CHECK(a == b);
}

TEST_CASE("profile + plan through files") {
  TempDir dir;
  auto root = dir.file("registry");
  auto cache = dir.file("profiles.jsonl");
  auto out = dir.file("profile.jsonl");
  REQUIRE(run("model register --root " + root.string() +
              " --id synth-m --task synthetic --input-spec f32:batch,1 --output-spec f32:1")
              .exit_code == 0);

  auto profiled = run("profile --root " + root.string() +
                      " --model synth-m --batches 1,2,4 --iters 5 --warmup 0 --a-ms 2 --s-ms 0 "
                      "--q-ms 0 --out " +
                      out.string() + " --cache " + cache.string());
  REQUIRE(profiled.exit_code == 0);
  CHECK(json::parse(profiled.out).at("records") == 3);

  auto planned = run("plan --cache " + cache.string() + " --model synth-m --slo-ms 50");
  REQUIRE(planned.exit_code == 0);
  json plan = json::parse(planned.out);
  CHECK(plan.at("batch_size") == 4);  // throughput max under a generous SLO
  CHECK(plan.at("slo_satisfied") == true);

  auto missing = run("plan --cache " + cache.string() + " --model ghost --slo-ms 50");
  CHECK(missing.exit_code == v2r::exit_code(v2r::Errc::no_profile));
}

TEST_CASE("bench match schema") {
  auto r = run("bench match --n 2000 --dim 32 --k 5 --queries 3 --verify");
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(out.at("suite") == "match");
  CHECK(out.at("single_thread_ms_per_query").get<double>() > 0.0);
  CHECK(out.at("pooled_ms_per_query").get<double>() > 0.0);
  CHECK(out.at("oracle_agreement").get<double>() == 1.0);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("plan").exit_code == 2);            // missing --model
  CHECK(run("frobnicate").exit_code == 2);      // unknown subcommand
  CHECK(run("").exit_code == 2);                // subcommand required
}

int main(int argc, char** argv) {
  doctest::Context context;
  // binary path arrives as the first non-doctest argument
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (!arg.empty() && arg[0] != '-') {
      g_binary = arg;
      break;
    }
  }
  if (g_binary.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-v2r-binary>\n");
    return 1;
  }
  context.applyCommandLine(1, argv);
  return context.run();
}
