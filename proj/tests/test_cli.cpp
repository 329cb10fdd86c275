#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CIRCLE_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch() {
  const auto d = fs::temp_directory_path() / "circle_cli_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("dioph certify") {
  const auto r = run("dioph certify --alpha \"(sqrt(5)-1)/2\" --q 1 --K 100");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["K"] == 100);
  CHECK(j["q"] == 1.0);
  CHECK(j["gamma"].get<double>() > 0.3);
  CHECK(run("dioph certify --alpha 0.5 --K 10").status != 0);
}

TEST_CASE("solvers through flags and configs") {
  const auto dir = scratch();
  std::ofstream(dir / "run.json") << R"({"eta": 0.1, "eps": 1e-4})";
  const auto cfg = (dir / "run.json").string();

  auto r = run("solve-gt --config " + cfg + " --tol 1e-10 --csv " + (dir / "g.csv").string());
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["residual"].get<double>() <= 1e-10);
  CHECK(j["graph"].size() >= 1024);
  CHECK(j["graph"].size() == j["grid"].get<size_t>());
  CHECK(j.contains("C"));
  CHECK(fs::file_size(dir / "g.csv") > 1000);

  r = run("russmann --config " + cfg + " --nu \"alpha + 0.01\"");
  REQUIRE(r.status == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["lambda"].get<double>() - 2 * 3.141592653589793 * 0.1 * 0.01) < 1e-3);
  CHECK(j["gamma"].contains("coeffs"));
  CHECK(j["h"].contains("coeffs"));

  r = run("c-alpha --eta 0.1 --eps 1e-4 --bracket \"alpha-0.01,alpha+0.01\"");
  REQUIRE(r.status == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["lambda"].get<double>()) <= 1e-11);
  CHECK(j.contains("nu_star"));
  CHECK(j.contains("defect"));

  r = run("normal-form --config " + cfg + " --k 4");
  REQUIRE(r.status == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["beta_bar"].size() == 4);
  CHECK(j["alpha_bar"].size() == 4);
  CHECK(j["residual_report"]["commutation"].get<double>() <= 1e-9);

  r = run("classify --config " + cfg + " --grid \"nu=alpha-0.01:alpha+0.01:3,eta=0.01:0.1:2\"");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("nu,eta,eps,region_tag,residual\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);

  CHECK(run("russmann --eps 1e-4").status == 2);
  CHECK(run("classify --config " + cfg + " --grid \"mu=1:2:3\"").status == 2);
  fs::remove_all(dir);
}

TEST_CASE("sweep subcommand") {
  const auto dir = scratch();
  std::ofstream(dir / "spec.json") << R"({"eps_list": [1e-4], "eta_range": [0.01, 0.1], "eta_steps": 4,
      "nu_range": ["alpha-0.02", "alpha+0.02"], "nu_steps": 5, "pipeline": "full"})";
  const auto out = (dir / "r.csv").string();
  auto r = run("sweep --spec " + (dir / "spec.json").string() + " --out " + out + " --svg " +
               (dir / "r.svg").string());
  CHECK(r.status == 0);
  CHECK(fs::exists(dir / "r.svg"));
  CHECK(fs::exists(dir / "r.csv.json"));
  CHECK(fs::exists(dir / "r.calpha.csv"));
  r = run("sweep --resume --spec " + (dir / "spec.json").string() + " --out " + out);
  CHECK(r.status == 0);
  fs::remove_all(dir);
}
