#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "golomb/report.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  fs::path out_path = fs::temp_directory_path() / ("golomb_cli_out_" + std::to_string(counter) + ".txt");
  fs::path err_path = fs::temp_directory_path() / ("golomb_cli_err_" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = env_prefix + "\"" + GOLOMB_CLI_PATH + "\" " + args + " > \"" +
                    out_path.string() + "\" 2> \"" + err_path.string() + "\"";
  int rc = std::system(cmd.c_str());
  CliResult result;
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return result;
}

}  // namespace

TEST_CASE("count emits a JSON summary") {
  CliResult res = run_cli("count --p 7 --shifts 1");
  REQUIRE(res.status == 0);
  nlohmann::json doc = nlohmann::json::parse(res.out);
  REQUIRE(doc.at("p") == 7);
  REQUIRE(doc.at("n_exact") == 2);
  REQUIRE(doc.at("shifts") == nlohmann::json::array({1}));
  REQUIRE(doc.at("main_term").get<double>() == Catch::Approx(4.0 / 7.0));
  REQUIRE(doc.at("decomposition").is_null());
}

TEST_CASE("count with decomposition") {
  CliResult res = run_cli("count --p 7 --shifts 1,2 --decompose");
  REQUIRE(res.status == 0);
  nlohmann::json doc = nlohmann::json::parse(res.out);
  REQUIRE(doc.at("n_exact") == 0);
  REQUIRE(doc.at("decomposition").at("n_from_split") == 0);
  double sigma1 = doc.at("decomposition").at("sigma1").get<double>();
  double sigma2 = doc.at("decomposition").at("sigma2").get<double>();
  REQUIRE(sigma1 + sigma2 == Catch::Approx(0.0).margin(1e-6));
  REQUIRE(sigma1 == Catch::Approx((2.0 / 6.0) * (2.0 / 6.0) * (2.0 / 6.0) * 4.0));
}

TEST_CASE("count rejects bad input with exit 2") {
  REQUIRE(run_cli("count --p 9 --shifts 1").status == 2);   // composite
  REQUIRE(run_cli("count --p 8 --shifts 1").status == 2);   // even
  REQUIRE(run_cli("count --p 7 --shifts 0").status == 2);   // shift out of range
  REQUIRE(run_cli("count --p 7 --shifts 1,1").status == 2); // duplicate
  REQUIRE(run_cli("count --p 7").status == 2);              // missing required flag
  REQUIRE(run_cli("count --p 9 --shifts 1").err.find("composite") != std::string::npos);
}

TEST_CASE("usage errors and help") {
  REQUIRE(run_cli("").status == 2);          // subcommand required
  REQUIRE(run_cli("nonsense").status == 2);
  REQUIRE(run_cli("--help").status == 0);
  REQUIRE(run_cli("sweep --help").status == 0);
}

TEST_CASE("budget refusal surfaces as a runtime failure") {
  CliResult res = run_cli("count --p 61 --shifts 1,2 --decompose --budget 100");
  REQUIRE(res.status == 1);
  REQUIRE(res.err.find("budget") != std::string::npos);
}

TEST_CASE("verify subcommand") {
  CliResult res = run_cli("verify --kind indicator --min 3 --max 40");
  REQUIRE(res.status == 0);
  REQUIRE(res.out.find("indicator:") != std::string::npos);
  REQUIRE(res.out.find(" 0 failures") != std::string::npos);

  REQUIRE(run_cli("verify --kind all --min 5 --max 25 --samples 5").status == 0);
  REQUIRE(run_cli("verify --kind nope --min 3 --max 10").status == 2);
  REQUIRE(run_cli("verify --min 3 --max 10").status == 2);
}

TEST_CASE("sweep writes loadable records") {
  fs::path path = fs::temp_directory_path() / "golomb_cli_sweep.csv";
  CliResult res = run_cli("sweep --min 5 --max 13 --r 1 --policy canonical --out \"" +
                          path.string() + "\" --format csv");
  REQUIRE(res.status == 0);
  auto records = golomb::read_records(path.string());
  fs::remove(path);
  REQUIRE(records.size() == 4);
  REQUIRE(records[0].p == 5);
  REQUIRE(records[1].n_exact == 2);  // p = 7
  REQUIRE(records[3].p == 13);
}

TEST_CASE("sweep then fit end to end") {
  fs::path path = fs::temp_directory_path() / "golomb_cli_sweep.json";
  CliResult res = run_cli("sweep --min 100 --max 400 --r 1 --policy canonical --out \"" +
                          path.string() + "\" --format json");
  REQUIRE(res.status == 0);

  CliResult fit = run_cli("fit --in \"" + path.string() + "\" --epsilon 0.1");
  fs::remove(path);
  REQUIRE(fit.status == 0);
  nlohmann::json doc = nlohmann::json::parse(fit.out);
  REQUIRE(doc.contains("slope"));
  REQUIRE(doc.at("sample_count").get<int>() > 10);
  REQUIRE(doc.at("epsilon").get<double>() == Catch::Approx(0.1));
}

TEST_CASE("fit failure modes") {
  REQUIRE(run_cli("fit --in /nonexistent/golomb.csv").status == 1);

  fs::path path = fs::temp_directory_path() / "golomb_cli_single_row.csv";
  {
    std::ofstream os(path);
    os << golomb::kCsvHeader << "\n";
    os << "7,1,1,2,0.5714285714285714,1.4285714285714286,1.4285714285714286,,,2,2,\n";
  }
  REQUIRE(run_cli("fit --in \"" + path.string() + "\"").status == 2);
  fs::remove(path);
}

TEST_CASE("sweep output is byte-identical across runs and worker counts") {
  fs::path a = fs::temp_directory_path() / "golomb_cli_det_a.csv";
  fs::path b = fs::temp_directory_path() / "golomb_cli_det_b.csv";
  std::string args = "sweep --min 5 --max 60 --r 2 --policy random:2 --seed 11 --format csv --out ";
  REQUIRE(run_cli(args + "\"" + a.string() + "\"").status == 0);
  REQUIRE(run_cli(args + "\"" + b.string() + "\"", "GOLOMB_WORKERS=3 ").status == 0);
  std::string bytes_a = slurp(a);
  std::string bytes_b = slurp(b);
  fs::remove(a);
  fs::remove(b);
  REQUIRE_FALSE(bytes_a.empty());
  REQUIRE(bytes_a == bytes_b);
}

TEST_CASE("config file supplies defaults, flags win") {
  fs::path cfg = fs::temp_directory_path() / "golomb_cli_config.ini";
  {
    std::ofstream os(cfg);
    os << "[count]\np=7\nshifts=1\n";
  }
  CliResult from_cfg = run_cli("--config \"" + cfg.string() + "\" count");
  REQUIRE(from_cfg.status == 0);
  REQUIRE(nlohmann::json::parse(from_cfg.out).at("n_exact") == 2);

  CliResult overridden = run_cli("--config \"" + cfg.string() + "\" count --p 11");
  fs::remove(cfg);
  REQUIRE(overridden.status == 0);
  nlohmann::json doc = nlohmann::json::parse(overridden.out);
  REQUIRE(doc.at("p") == 11);
  REQUIRE(doc.at("n_exact") == 1);  // shifts still come from the config
}
