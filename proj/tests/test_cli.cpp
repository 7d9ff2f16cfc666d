#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "primlat_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(PRIMLAT_CLI) + " " + args + " >" + (kWork / "stdout.txt").string() + " 2>" +
                          (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Workdir {
  Workdir() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE_FIXTURE(Workdir, "enumerate n = 2, R = 2.5") {
  const fs::path out = kWork / "small";
  REQUIRE(run("enumerate --n 2 --radius 2.5 --out " + out.string()) == 0);
  const std::string csv = slurp(out / "records.csv");
  CHECK(count_lines(csv) == 17);
  CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE_FIXTURE(Workdir, "reruns are byte-identical across thread counts") {
  const fs::path a = kWork / "a", b = kWork / "b";
  REQUIRE(run("enumerate --n 3 --radius 15 --seed 5 --threads 1 --out " + a.string()) == 0);
  REQUIRE(run("enumerate --n 3 --radius 15 --seed 5 --threads 4 --out " + b.string()) == 0);
  CHECK(slurp(a / "records.csv") == slurp(b / "records.csv"));
}

TEST_CASE_FIXTURE(Workdir, "exit codes") {
  CHECK(run("enumerate --n 6 --out " + (kWork / "x").string()) == 1);
  CHECK(slurp(kWork / "stderr.txt").find("unsupported dimension") != std::string::npos);
  CHECK(run("enumerate --radius 1") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("oracle --suite nope") == 1);
  CHECK(run("oracle") == 1);

  {
    std::ofstream(kWork / "bad.json") << "{\"n\": 3, \"colour\": 1}";
  }
  CHECK(run("enumerate --config " + (kWork / "bad.json").string()) == 1);
  CHECK(run("enumerate --config " + (kWork / "missing.json").string()) == 2);

  CHECK(run("enumerate --n 2 --radius 5 --out /proc/primlat_no_such_dir") == 2);

  { std::ofstream(kWork / "empty.csv"); }
  CHECK(run("analyze --n 2 --radius 5 --out " + kWork.string() + " --records " + (kWork / "empty.csv").string()) == 3);
  {
    std::ofstream(kWork / "wrong.csv") << "a,b,c\n1,2,3\n";
  }
  CHECK(run("analyze --n 2 --radius 5 --out " + kWork.string() + " --records " + (kWork / "wrong.csv").string()) == 3);
}

TEST_CASE_FIXTURE(Workdir, "oracle suites pass") {
  for (const char* suite : {"cvp", "covering", "reduction", "lalpha"}) {
    CHECK_MESSAGE(run(std::string("oracle --suite ") + suite + " --seed 3") == 0, suite);
    CHECK(slurp(kWork / "stdout.txt").find("PASS") != std::string::npos);
  }
}

TEST_CASE_FIXTURE(Workdir, "report, nu-estimate and cusp") {
  const fs::path out = kWork / "rep";
  REQUIRE(run("report --n 3 --radius 12 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "nu_density.csv"));
  REQUIRE(run("nu-estimate --n 3 --radius 12 --out " + out.string()) == 0);
  CHECK(slurp(out / "nu_estimate.csv").rfind("alpha,cdf,stderr\n", 0) == 0);
  REQUIRE(run("cusp --n 3 --radius 30 --out " + out.string()) == 0);
  CHECK(count_lines(slurp(out / "cusp.csv")) == 12);
  CHECK(run("cusp --n 2 --radius 30 --out " + out.string()) == 1);
}
