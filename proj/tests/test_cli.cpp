#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doslab/config.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "doslab-test-cli";

int dos_lab(const std::string& args) {
  const std::string cmd = std::string(DOS_LAB_EXE) + " " + args + " >" +
                          (kScratch / "stdout.txt").string() + " 2>" +
                          (kScratch / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kSmall = "--domain simple --agents 3 --sharers 0,1,3 --runs 2 --iters 4 --samples 16";

struct Scratch {
  Scratch() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
  ~Scratch() { fs::remove_all(kScratch); }
};

}  // namespace

TEST_CASE("run writes byte-identical outputs for the same seed") {
  Scratch s;
  const fs::path a = kScratch / "a", b = kScratch / "b";
  REQUIRE(dos_lab(std::string("run ") + kSmall + " --seed 4 --out " + a.string()) == 0);
  REQUIRE(dos_lab(std::string("run ") + kSmall + " --seed 4 --out " + b.string()) == 0);
  CHECK(slurp(a / "curves.csv") == slurp(b / "curves.csv"));
  CHECK(slurp(a / "schelling.csv") == slurp(b / "schelling.csv"));
  CHECK(!slurp(a / "curves.csv").empty());

  const auto meta = doslab::read_config_file(a / "meta.json");
  CHECK(meta["n"] == 3);
  CHECK(meta["master_seed"] == 4);
  CHECK(meta["ce"]["n_iter"] == 4);
}

TEST_CASE("worker count does not change the output") {
  Scratch s;
  const fs::path a = kScratch / "a", b = kScratch / "b";
  REQUIRE(dos_lab(std::string("run ") + kSmall + " --seed 9 --out " + a.string()) == 0);
  REQUIRE(::setenv("DOS_LAB_THREADS", "3", 1) == 0);
  const int code = dos_lab(std::string("run ") + kSmall + " --seed 9 --out " + b.string());
  ::unsetenv("DOS_LAB_THREADS");
  REQUIRE(code == 0);
  CHECK(slurp(a / "curves.csv") == slurp(b / "curves.csv"));
}

TEST_CASE("flags override values from the config file") {
  Scratch s;
  write(kScratch / "cfg.json",
        R"({"domain_kind": "logistic", "n": 3, "runs": 1, "sharer_counts": [0, 3],
            "ce": {"n_iter": 3, "n_sample": 8, "alpha": 0.9}})");
  const fs::path out = kScratch / "out";
  REQUIRE(dos_lab("run --config " + (kScratch / "cfg.json").string() + " --lr 0.4 --out " + out.string()) == 0);
  const auto meta = doslab::read_config_file(out / "meta.json");
  CHECK(meta["ce"]["alpha"] == 0.4);
  CHECK(meta["ce"]["n_iter"] == 3);
  CHECK(meta["domain_kind"] == "logistic");
}

TEST_CASE("configuration errors exit with status 2") {
  Scratch s;
  const std::string out = " --out " + (kScratch / "x").string();
  CHECK(dos_lab(std::string("run ") + kSmall + " --elite-frac 1.5" + out) == 2);
  CHECK(slurp(kScratch / "stderr.txt").find("ce.psi") != std::string::npos);
  CHECK(dos_lab("run --domain simple --agents 3 --sharers 4" + out) == 2);
  CHECK(dos_lab("run --domain nowhere --agents 3" + out) == 2);
  CHECK(dos_lab("run --agents 3" + out) == 2);
  CHECK(dos_lab("run --bogus-flag 1") == 2);
  CHECK(dos_lab("") == 2);
  // Nothing was computed or written.
  CHECK_FALSE(fs::exists(kScratch / "x"));
}

TEST_CASE("an unwritable output directory fails before computing") {
  Scratch s;
  write(kScratch / "blocker", "x");
  CHECK(dos_lab(std::string("run ") + kSmall + " --out " + (kScratch / "blocker" / "out").string()) == 3);
}

TEST_CASE("validate prints the resolved config or rejects it") {
  Scratch s;
  write(kScratch / "good.json", R"({"domain_kind": "simple", "n": 10})");
  CHECK(dos_lab("validate " + (kScratch / "good.json").string()) == 0);
  const auto resolved = nlohmann::json::parse(slurp(kScratch / "stdout.txt"));
  CHECK(resolved["ce"]["psi"] == 0.25);
  CHECK(resolved["sharer_counts"].size() == 11);

  write(kScratch / "bad.json", R"({"domain_kind": "simple", "n": 10, "colour": "red"})");
  CHECK(dos_lab("validate " + (kScratch / "bad.json").string()) == 2);
  CHECK(slurp(kScratch / "stderr.txt").find("colour") != std::string::npos);

  write(kScratch / "broken.json", "{");
  CHECK(dos_lab("validate " + (kScratch / "broken.json").string()) == 2);
}

TEST_CASE("meta.json is itself a valid config") {
  Scratch s;
  const fs::path out = kScratch / "out";
  REQUIRE(dos_lab(std::string("run ") + kSmall + " --seed 2 --out " + out.string()) == 0);
  CHECK(dos_lab("validate " + (out / "meta.json").string()) == 0);
}
