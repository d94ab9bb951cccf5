#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <cubeslice/cube.hpp>
#include <cubeslice/json_io.hpp>

using namespace cubeslice;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  REQUIRE(out.good());
  out << text;
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "cubeslice_cli_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    REQUIRE(mkdtemp(buf.data()) != nullptr);
    path = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the installed binary with stderr captured to a side file.
CliResult run_cli(const std::string& args, const fs::path& dir) {
  fs::path errfile = dir / "stderr.txt";
  std::string cmd = std::string(CUBESLICE_CLI_PATH) + " " + args + " 2>" + errfile.string();
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
  int status = pclose(pipe);
  REQUIRE(status != -1);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.err = slurp(errfile);
  return res;
}

std::string arg(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("cover conversion and edge verification round trip", "[cli]") {
  TempDir td;

  HyperplaneFamily cover;
  cover.n = 2;
  cover.planes = {Hyperplane{{1, 1}, 0}, Hyperplane{{1, -1}, 0}};
  write_file(td.path / "cover.json", family_to_json(cover).dump());

  auto conv = run_cli("cover-to-slice --family " + arg(td.path / "cover.json") + " --out " +
                          arg(td.path / "sliced.json"),
                      td.path);
  REQUIRE(conv.code == 0);
  REQUIRE(conv.out == slurp(td.path / "sliced.json"));

  auto ver = run_cli("verify --family " + arg(td.path / "sliced.json"), td.path);
  REQUIRE(ver.code == 0);
  json v = json::parse(ver.out);
  REQUIRE(v["n"] == 2);
  REQUIRE(v["k"] == 4);
  REQUIRE(v["all_sliced"] == true);
  REQUIRE(v["unsliced_count"] == 0);
  REQUIRE(!v.contains("first_unsliced"));

  auto none = run_cli("find-unsliced --family " + arg(td.path / "sliced.json"), td.path);
  REQUIRE(none.code == 2);
  REQUIRE(json::parse(none.out)["found"] == false);
}

TEST_CASE("verify reports the first missed edge of an incomplete family", "[cli]") {
  TempDir td;

  HyperplaneFamily single;
  single.n = 3;
  single.planes = {Hyperplane{{1, 1, 1}, 0}};
  write_file(td.path / "single.json", family_to_json(single).dump());

  auto ver = run_cli("verify --family " + arg(td.path / "single.json"), td.path);
  REQUIRE(ver.code == 2);
  json v = json::parse(ver.out);
  REQUIRE(v["all_sliced"] == false);
  REQUIRE(v["unsliced_count"] == 6);
  REQUIRE(v["first_unsliced"]["vertex"].dump() == "[-1,-1,-1]");
  REQUIRE(v["first_unsliced"]["dir"] == 1);

  auto fu = run_cli("find-unsliced --family " + arg(td.path / "single.json"), td.path);
  REQUIRE(fu.code == 0);
  json f = json::parse(fu.out);
  REQUIRE(f["found"] == true);
  REQUIRE(f["edge"]["vertex"].dump() == "[-1,-1,-1]");
  REQUIRE(f["edge"]["dir"] == 1);
}

TEST_CASE("bang-solve prints a verified solution", "[cli]") {
  TempDir td;
  write_file(td.path / "bang.json", R"({"M": [[1, 0], [0, 1]], "gamma": [0, 0], "theta": 1})");

  auto bs = run_cli("bang-solve --instance " + arg(td.path / "bang.json"), td.path);
  REQUIRE(bs.code == 0);
  json b = json::parse(bs.out);
  REQUIRE(b["epsilon"].dump() == "[1,1]");
  REQUIRE(b["margins"].dump() == R"(["1","1"])");
  REQUIRE(b["flips"] == 0);
  REQUIRE(b["verified"] == true);
}

TEST_CASE("sample-chain echoes the seed and repeats byte for byte", "[cli]") {
  TempDir td;
  write_file(td.path / "m3.json", R"({"p": ["1/2", "1/2", "1/2"]})");

  std::string args = "sample-chain --measure " + arg(td.path / "m3.json") + " --seed 7";
  auto c1 = run_cli(args, td.path);
  auto c2 = run_cli(args, td.path);
  REQUIRE(c1.code == 0);
  REQUIRE(c2.code == 0);
  REQUIRE(c1.out == c2.out);

  json ch = json::parse(c1.out);
  REQUIRE(ch["seed"] == 7);
  auto order = ch["order"].get<std::vector<int>>();
  std::sort(order.begin(), order.end());
  REQUIRE(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("set-family bounds through the command line", "[cli]") {
  TempDir td;
  write_file(td.path / "m4.json", R"({"p": ["1/2", "1/2", "1/2", "1/2"]})");
  write_file(td.path / "middle.json",
             R"({"n": 4, "sets": [[1,2],[1,3],[1,4],[2,3],[2,4],[3,4]]})");

  auto lym = run_cli("check-lym --sets " + arg(td.path / "middle.json") + " --measure " +
                         arg(td.path / "m4.json"),
                     td.path);
  REQUIRE(lym.code == 0);
  json lj = json::parse(lym.out);
  REQUIRE(lj["value"] == "1");
  REQUIRE(lj["holds"] == true);
  REQUIRE(lj["is_antichain"] == true);

  auto sper = run_cli("check-sperner --sets " + arg(td.path / "middle.json") + " --measure " +
                          arg(td.path / "m4.json"),
                      td.path);
  REQUIRE(sper.code == 0);
  json sj = json::parse(sper.out);
  REQUIRE(sj["value"] == "3/8");
  REQUIRE(sj["holds"] == true);

  // a comparable pair is rejected as bad input, not reported as a failed bound
  write_file(td.path / "m1.json", R"({"p": ["1/2"]})");
  write_file(td.path / "chain.json", R"({"n": 1, "sets": [[], [1]]})");
  auto bad = run_cli("check-lym --sets " + arg(td.path / "chain.json") + " --measure " +
                         arg(td.path / "m1.json"),
                     td.path);
  REQUIRE(bad.code == 1);
  REQUIRE(bad.err.find("error:") != std::string::npos);
}

TEST_CASE("anticoncentration and monotone checks succeed on small inputs", "[cli]") {
  TempDir td;
  write_file(td.path / "m4.json", R"({"p": ["1/2", "1/2", "1/2", "1/2"]})");

  auto ac = run_cli("check-anticoncentration --measure " + arg(td.path / "m4.json"), td.path);
  REQUIRE(ac.code == 0);
  json aj = json::parse(ac.out);
  REQUIRE(aj["max_level_prob"] == "3/8");
  REQUIRE(aj["holds"] == true);

  // f(x) = 1 iff x_1 = -1: decreasing in coordinate 1, so u = {1}
  write_file(td.path / "m2.json", R"({"p": ["1/2", "1/2"]})");
  write_file(td.path / "dict.json", R"({"n": 2, "table_hex": "5"})");
  auto mono = run_cli("check-monotone --function " + arg(td.path / "dict.json") + " --measure " +
                          arg(td.path / "m2.json") + " --u 1",
                      td.path);
  REQUIRE(mono.code == 0);
  json mj = json::parse(mono.out);
  REQUIRE(mj["value"] == "1/2");
  REQUIRE(mj["holds"] == true);
  REQUIRE(mj["degree1_coefficients"].size() == 2);
  REQUIRE(mj["degree1_coefficients"][0].get<double>() == Catch::Approx(-0.5));
  REQUIRE(mj["degree1_coefficients"][1].get<double>() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("decompose re-verifies its own output", "[cli]") {
  TempDir td;
  write_file(td.path / "mat.json", R"({"rows": [[1, 0], [0, 1]]})");

  auto dec = run_cli("decompose --matrix " + arg(td.path / "mat.json") + " --check", td.path);
  REQUIRE(dec.code == 0);
  json dj = json::parse(dec.out);
  REQUIRE(dj["check"] == true);
}

TEST_CASE("find-missing-edge exposes the uncut cube", "[cli]") {
  TempDir td;
  write_file(td.path / "empty.json", R"({"n": 3, "planes": []})");

  auto fme = run_cli("find-missing-edge --family " + arg(td.path / "empty.json") + " --seed 5",
                     td.path);
  REQUIRE(fme.code == 0);
  json j = json::parse(fme.out);
  REQUIRE(j["found"] == true);
  REQUIRE(j["edge"]["vertex"].dump() == "[1,1,1]");
  REQUIRE(j["edge"]["dir"] == 1);
  REQUIRE(j["trace"]["schema_version"] == 1);
}

TEST_CASE("search-family finds a two-plane slicing of the square", "[cli]") {
  TempDir td;

  auto sf = run_cli("search-family --n 2 --k 2 --seed 3", td.path);
  REQUIRE(sf.code == 0);
  json j = json::parse(sf.out);
  REQUIRE(j["success"] == true);
  REQUIRE(j["best_unsliced"] == 0);
  REQUIRE(j["family"]["n"] == 2);
  REQUIRE(j["family"]["planes"].size() == 2);
}

TEST_CASE("bad input exits with code 1 and an error line", "[cli]") {
  TempDir td;

  write_file(td.path / "garbage.json", "{ not json");
  auto g = run_cli("verify --family " + arg(td.path / "garbage.json"), td.path);
  REQUIRE(g.code == 1);
  REQUIRE(g.err.find("error:") != std::string::npos);

  write_file(td.path / "nofield.json", R"({"n": 2})");
  auto nf = run_cli("verify --family " + arg(td.path / "nofield.json"), td.path);
  REQUIRE(nf.code == 1);
  REQUIRE(nf.err.find("error:") != std::string::npos);

  write_file(td.path / "floatp.json", R"({"p": [0.5]})");
  auto fp = run_cli("check-anticoncentration --measure " + arg(td.path / "floatp.json"), td.path);
  REQUIRE(fp.code == 1);
  REQUIRE(fp.err.find("error:") != std::string::npos);
}

TEST_CASE("suite output is byte-identical across reruns and worker counts", "[suitedet]") {
  TempDir td;

  auto r1 = run_cli("suite --seed 42 --workers 2", td.path);
  auto r2 = run_cli("suite --seed 42 --workers 4", td.path);
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  REQUIRE(r1.out == r2.out);

  json rep = json::parse(r1.out);
  REQUIRE(rep["schema_version"] == 1);
  REQUIRE(rep["seed"] == 42);
  REQUIRE(rep["all_pass"] == true);
  REQUIRE(rep["criteria"].size() == 11);
}
