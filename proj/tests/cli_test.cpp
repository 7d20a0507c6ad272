#include "ifbls/cli.hpp"
#include "ifbls/model_io.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace ifbls;
using ifbls::test::read_text;
using ifbls::test::write_text;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ifbls");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path dir = ifbls::test::temp_dir("cli");
  fs::path blobs = dir / "blobs.csv";
  Workspace() { ifbls::test::write_dataset_csv(blobs, ifbls::test::two_blobs(20, 3.0, 0.6, 4)); }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

std::vector<std::string> train_args(const Workspace& ws, const std::string& out) {
  return {"train", "--data", ws.blobs.string(), "--variant", "if-bls", "--C", "100", "--mu", "2",
          "--m", "5", "--p", "5", "--q", "15", "--seed", "1", "--out", out};
}

}  // namespace

TEST_CASE("train writes a model and its manifest") {
  Workspace ws;
  const auto r = run_cli(train_args(ws, ws("model.bfz")));
  CHECK(r.code == cli::kExitOk);
  CHECK(fs::exists(ws("model.bfz")));
  CHECK(r.out.find("training accuracy") != std::string::npos);
  REQUIRE(fs::exists(ws("model.bfz.manifest.json")));
  const auto manifest = nlohmann::json::parse(read_text(ws("model.bfz.manifest.json")));
  CHECK(manifest["command"] == "train");
  CHECK(manifest["tool"] == "ifbls");
  CHECK(manifest["datasets"].size() == 1);
  CHECK(manifest["artifacts"].size() == 1);
  CHECK(manifest["config"]["variant"] == "if-bls");
  CHECK(read_text(ws("model.bfz")).find("# manifest:") != std::string::npos);

  // Same flags, same model bytes apart from nothing time-dependent.
  run_cli(train_args(ws, ws("model2.bfz")));
  auto strip = [](std::string s) {
    const auto a = s.find("# manifest:");
    return s.erase(a, s.find('\n', a) - a);
  };
  CHECK(strip(read_text(ws("model.bfz"))) == strip(read_text(ws("model2.bfz"))));
}

TEST_CASE("usage errors exit with 2") {
  Workspace ws;
  CHECK(run_cli({"train", "--data", ws.blobs.string(), "--out", ws("m")}).code == cli::kExitUsage);
  CHECK(run_cli({"train", "--data", ws.blobs.string(), "--variant", "svm", "--out", ws("m")}).code ==
        cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"noise", "--data", ws.blobs.string(), "--level", "101", "--out", ws("n.csv")})
            .code == cli::kExitUsage);
  CHECK(run_cli({"cv", "--data", ws.blobs.string(), "--variant", "bls", "--k", "x", "--out",
                 ws("cv.csv")})
            .code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
  CHECK(run_cli({"--version"}).out == std::string(cli::kToolVersion) + "\n");
}

TEST_CASE("single-class data with a fuzzy variant is a runtime error") {
  Workspace ws;
  write_text(ws.dir / "one.csv", "a,b,y\n1,2,p\n3,4,p\n5,6,p\n");
  const auto r = run_cli({"train", "--data", ws("one.csv"), "--variant", "f-bls", "--out", ws("m")});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("f-bls") != std::string::npos);
  CHECK(r.err.find("two classes") != std::string::npos);
  CHECK_FALSE(fs::exists(ws("m")));
}

TEST_CASE("bad data is a runtime error") {
  Workspace ws;
  write_text(ws.dir / "bad.csv", "a,b,y\n1,2,p\n3,zz,q\n");
  const auto r = run_cli({"train", "--data", ws("bad.csv"), "--variant", "bls", "--out", ws("m")});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("row 2, column b") != std::string::npos);
  CHECK(run_cli({"train", "--data", ws("nope.csv"), "--variant", "bls", "--out", ws("m")}).code ==
        cli::kExitRuntime);
}

TEST_CASE("config file supplies values and flags override them") {
  Workspace ws;
  write_text(ws.dir / "run.cfg",
             "[model]\nvariant = bls\nC = 10\nseed = 3\n\n[network]\nm = 2\np = 4\nq = 6\n\n[data]\npath = " +
                 ws.blobs.string() + "\n");
  CHECK(run_cli({"train", "--config", ws("run.cfg"), "--out", ws("a.bfz")}).code == cli::kExitOk);
  CHECK(load_model(ws("a.bfz")).config.network.q == 6);
  CHECK(run_cli({"train", "--config", ws("run.cfg"), "--q", "9", "--out", ws("b.bfz")}).code ==
        cli::kExitOk);
  CHECK(load_model(ws("b.bfz")).config.network.q == 9);
  write_text(ws.dir / "broken.cfg", "[model]\nthis line has no equals sign\n");
  CHECK(run_cli({"train", "--config", ws("broken.cfg"), "--out", ws("c.bfz")}).code != cli::kExitOk);
}

TEST_CASE("predict") {
  Workspace ws;
  REQUIRE(run_cli(train_args(ws, ws("model.bfz"))).code == 0);
  const Dataset ds = load_csv(ws.blobs);
  const auto model = load_model(ws("model.bfz"));

  SUBCASE("matches in-memory predictions") {
    const auto r = run_cli({"predict", "--model", ws("model.bfz"), "--data", ws.blobs.string(),
                            "--drop-column", "label", "--out", ws("pred.csv")});
    REQUIRE(r.code == 0);
    std::string expected = "prediction\n";
    for (const auto& p : predict(model, ds.x)) expected += p + "\n";
    CHECK(read_text(ws("pred.csv")) == expected);
  }
  SUBCASE("wrong feature count names the expected dimension") {
    write_text(ws.dir / "three.csv", "a,b,c\n1,2,3\n");
    const auto r = run_cli({"predict", "--model", ws("model.bfz"), "--data", ws("three.csv"),
                            "--out", ws("pred.csv")});
    CHECK(r.code == cli::kExitRuntime);
    CHECK(r.err.find("expects 2") != std::string::npos);
  }
  SUBCASE("empty input gives an empty output") {
    write_text(ws.dir / "empty.csv", "");
    const auto r = run_cli({"predict", "--model", ws("model.bfz"), "--data", ws("empty.csv"),
                            "--out", ws("pred.csv")});
    CHECK(r.code == cli::kExitOk);
    CHECK(fs::exists(ws("pred.csv")));
    CHECK(read_text(ws("pred.csv")).empty());
  }
}

TEST_CASE("cv is deterministic and validates k") {
  Workspace ws;
  const std::vector<std::string> args{"cv", "--data", ws.blobs.string(), "--variant", "bls",
                                      "--k", "5", "--fold-seed", "3", "--m", "3", "--p", "4",
                                      "--q", "8", "--out"};
  auto a = args, b = args;
  a.push_back(ws("cv1.csv"));
  b.push_back(ws("cv2.csv"));
  REQUIRE(run_cli(a).code == 0);
  REQUIRE(run_cli(b).code == 0);
  const std::string text = read_text(ws("cv1.csv"));
  CHECK(text == read_text(ws("cv2.csv")));
  CHECK(text.rfind("fold,n_train,n_test,accuracy,status\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);

  auto big = args;
  big[6] = "41";
  big.push_back(ws("cv3.csv"));
  CHECK(run_cli(big).code == cli::kExitRuntime);
}

TEST_CASE("gridsearch") {
  Workspace ws;
  SUBCASE("paper grid size") {
    const auto r = run_cli({"gridsearch", "--data", ws.blobs.string(), "--grid", "paper",
                            "--variant", "if-bls", "--count-only"});
    CHECK(r.code == 0);
    CHECK(r.out == std::to_string(7 * 11 * 10 * 11 * 11) + "\n");
  }
  SUBCASE("grid file, deterministic across job counts") {
    write_text(ws.dir / "grid.txt", "C = 0.1, 1, 10\nm = 2\np = 3\nq = 5:5:10\n");
    const std::vector<std::string> base{"gridsearch", "--data", ws.blobs.string(), "--grid",
                                        ws("grid.txt"), "--variant", "bls", "--fold-seed", "2"};
    auto a = base, b = base;
    a.insert(a.end(), {"--jobs", "1", "--out", ws("g1.csv")});
    b.insert(b.end(), {"--jobs", "3", "--out", ws("g2.csv")});
    REQUIRE(run_cli(a).code == 0);
    REQUIRE(run_cli(b).code == 0);
    const std::string text = read_text(ws("g1.csv"));
    CHECK(text == read_text(ws("g2.csv")));
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
    CHECK(text.rfind("index,variant,C,m,p,l,q,mu,delta,epsilon,mean_accuracy", 0) == 0);
  }
  SUBCASE("missing --out") {
    CHECK(run_cli({"gridsearch", "--data", ws.blobs.string(), "--grid", "paper", "--variant",
                   "bls"})
              .code == cli::kExitUsage);
  }
  SUBCASE("malformed grid file is a usage error") {
    write_text(ws.dir / "grid.txt", "C = 1, x\n");
    CHECK(run_cli({"gridsearch", "--data", ws.blobs.string(), "--grid", ws("grid.txt"),
                   "--variant", "bls", "--out", ws("g.csv")})
              .code == cli::kExitUsage);
  }
}

TEST_CASE("noise") {
  Workspace ws;
  auto noise = [&](const std::string& level, const std::string& seed, const std::string& out) {
    return run_cli({"noise", "--data", ws.blobs.string(), "--level", level, "--seed", seed, "--out",
                    ws(out)});
  };
  REQUIRE(noise("0", "1", "n0.csv").code == 0);
  CHECK(read_text(ws("n0.csv")) == read_text(ws.blobs));
  REQUIRE(noise("20", "9", "a.csv").code == 0);
  REQUIRE(noise("20", "9", "b.csv").code == 0);
  CHECK(read_text(ws("a.csv")) == read_text(ws("b.csv")));
  CHECK(read_text(ws("a.csv")) != read_text(ws.blobs));
  CHECK(load_csv(ws("a.csv")).labels == load_csv(ws.blobs).labels);
}

TEST_CASE("stats over the benchmark table") {
  Workspace ws;
  const auto r = run_cli({"stats", "--table", ifbls::test::test_data("uci_benchmark_accuracy.csv").string(),
                          "--out-dir", ws("report")});
  REQUIRE(r.code == 0);
  const std::string rank_text = read_text(ws.dir / "report" / "ranks.csv");
  const auto avg_line = rank_text.substr(rank_text.find("average,"));
  CHECK(avg_line.rfind("average,3.0892857142857144,", 0) == 0);
  const std::string wtl = read_text(ws.dir / "report" / "win_tie_loss.csv");
  CHECK(wtl.find("IF-BLS,BLS,21,2,5,") != std::string::npos);
  CHECK(fs::exists(ws.dir / "report" / "report.md"));
  CHECK(fs::exists(ws.dir / "report" / "friedman.csv.manifest.json"));
  CHECK(read_text(ws.dir / "report" / "friedman.csv").find("86.158") != std::string::npos);
}

TEST_CASE("stats edge cases") {
  Workspace ws;
  SUBCASE("identical columns surface per-pair Wilcoxon errors and continue") {
    write_text(ws.dir / "same.csv", "dataset,A,B\nd1,1,1\nd2,2,2\nd3,3,3\nd4,4,4\nd5,5,5\n");
    const auto r = run_cli({"stats", "--table", ws("same.csv"), "--out-dir", ws("r")});
    CHECK(r.err.find("no nonzero pairs") != std::string::npos);
    CHECK(read_text(ws.dir / "r" / "wilcoxon.csv").find("no nonzero pairs") != std::string::npos);
    CHECK(fs::exists(ws.dir / "r" / "win_tie_loss.csv"));
  }
  SUBCASE("a single dataset row makes Friedman refuse") {
    write_text(ws.dir / "one.csv", "dataset,A,B,C\nd1,1,2,3\n");
    const auto r = run_cli({"stats", "--table", ws("one.csv"), "--out-dir", ws("r")});
    CHECK(r.code == cli::kExitRuntime);
    CHECK(r.err.find("K >= 2") != std::string::npos);
    CHECK(fs::exists(ws.dir / "r" / "ranks.csv"));
  }
  SUBCASE("malformed table") {
    write_text(ws.dir / "bad.csv", "dataset,A,B\nd1,1,oops\n");
    CHECK(run_cli({"stats", "--table", ws("bad.csv"), "--out-dir", ws("r")}).code ==
          cli::kExitRuntime);
  }
}

TEST_CASE("relative data paths fall back to IFBLS_DATA_DIR") {
  Workspace ws;
  ::setenv("IFBLS_DATA_DIR", ws.dir.c_str(), 1);
  const auto r = run_cli({"train", "--data", "blobs.csv", "--variant", "bls", "--out", ws("m.bfz")});
  ::unsetenv("IFBLS_DATA_DIR");
  CHECK(r.code == 0);
}
