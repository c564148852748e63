#include <doctest.h>

#include <sstream>

#include "ecn/cli.hpp"
#include "ecn/distance.hpp"
#include "ecn/io.hpp"
#include "ecn/rerank.hpp"
#include "support.hpp"

using namespace ecn;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("synth, distance, rerank and eval from the command line") {
  test::TempDir dir;
  const auto prefix = dir / "s";
  REQUIRE(run({"synth", "--seed", "3", "--ids", "20", "--imgs", "4", "--dim", "8", "--intra", "1",
               "--inter", "1", "--cams", "2", "--out-prefix", prefix})
              .code == 0);
  const auto records = io::read_metadata(prefix + ".meta.csv");
  CHECK(records.size() == 80);

  REQUIRE(run({"distance", "--features", prefix + ".ecnf", "--out", dir / "d.ecnd"}).code == 0);
  const auto d = io::read_distance(dir / "d.ecnd");
  CHECK(d.rows == 80);

  SUBCASE("method none passes the input through") {
    REQUIRE(run({"rerank", "--distances", dir / "d.ecnd", "--meta", prefix + ".meta.csv", "--method", "none",
                 "--out", dir / "none.ecnd"})
                .code == 0);
    const auto out = io::read_distance(dir / "none.ecnd");
    const auto expected = slice(d, indices_with_role(records, Role::Query), indices_with_role(records, Role::Gallery));
    CHECK(out.data == expected.data);
  }

  SUBCASE("rerank then eval writes a report") {
    const auto r = run({"rerank", "--features", prefix + ".ecnf", "--meta", prefix + ".meta.csv", "--method",
                        "ecn-rank", "--out", dir / "r.ecnd"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("method=ecn-rank t=3 q=8 k=25") != std::string::npos);
    const auto e = run({"eval", "--distances", dir / "r.ecnd", "--meta", prefix + ".meta.csv", "--ranks", "1,5",
                        "--out", dir / "report.json"});
    REQUIRE(e.code == 0);
    CHECK(e.out.find("mAP") != std::string::npos);
    const auto bytes = io::read_bytes(dir / "report.json");
    const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    CHECK(j["num_queries"] == 20);
    CHECK(j["skipped_queries"] == 0);
    CHECK(j["cmc"].contains("1"));
    CHECK(j["cmc"].contains("5"));
    CHECK((j["map"] >= 0.0 && j["map"] <= 1.0));
  }

  SUBCASE("outputs are byte-identical across runs and thread counts") {
    for (const std::string method : {"rank-dist", "ecn-orig", "ecn-rank"}) {
      REQUIRE(run({"--threads", "1", "rerank", "--features", prefix + ".ecnf", "--meta", prefix + ".meta.csv",
                   "--method", method, "--k", "10", "--out", dir / "a.ecnd"})
                  .code == 0);
      REQUIRE(run({"rerank", "--threads", "3", "--features", prefix + ".ecnf", "--meta", prefix + ".meta.csv",
                   "--method", method, "--k", "10", "--out", dir / "b.ecnd"})
                  .code == 0);
      CHECK(io::read_bytes(dir / "a.ecnd") == io::read_bytes(dir / "b.ecnd"));
    }
    set_num_threads(0);
  }

  SUBCASE("errors map to exit codes") {
    io::write_bytes(std::vector<std::uint8_t>(40, 'X'), dir / "bad.ecnd");
    const auto bad = run({"eval", "--distances", dir / "bad.ecnd", "--meta", prefix + ".meta.csv"});
    CHECK(bad.code == static_cast<int>(ErrorCode::BadMagic));
    CHECK(bad.err.find("BadMagic") != std::string::npos);

    const auto big = run({"rerank", "--features", prefix + ".ecnf", "--meta", prefix + ".meta.csv", "--t", "40",
                          "--out", dir / "x.ecnd"});
    CHECK(big.code == static_cast<int>(ErrorCode::ParamsTooLarge));

    const auto shape = run({"eval", "--distances", dir / "d.ecnd", "--meta", prefix + ".meta.csv"});
    CHECK(shape.code == static_cast<int>(ErrorCode::ShapeMismatch));
  }
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"rerank", "--meta", "m.csv", "--out", "o.ecnd"}).code == 2);
  CHECK(run({"rerank", "--features", "f", "--distances", "d", "--meta", "m", "--out", "o"}).code == 2);
  CHECK(run({"rerank", "--features", "f", "--meta", "m", "--method", "jaccard", "--out", "o"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Exit codes") != std::string::npos);
  CHECK(run({"eval", "--distances", "/nonexistent.ecnd", "--meta", "/nonexistent.csv"}).code ==
        static_cast<int>(ErrorCode::IoError));
}

TEST_CASE("bench reports one row per size") {
  cli::BenchOptions options;
  options.sizes = {200, 400};
  options.runs = 1;
  const auto rows = cli::run_bench(options);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n_items == 200);
  CHECK(rows[1].n_items == 400);
  CHECK(rows[1].seconds > 0.0);

  test::TempDir dir;
  const auto r = run({"bench", "--sizes", "100,200", "--method", "ecn-orig", "--out", dir / "b.json"});
  CHECK(r.code == 0);
  CHECK(r.out.find("ratio") != std::string::npos);
}
