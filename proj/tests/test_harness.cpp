#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "golomb/golomb.hpp"

using namespace golomb;
namespace fs = std::filesystem;

namespace {

bool records_equal(const SweepRecord& a, const SweepRecord& b) {
  return a.p == b.p && a.r == b.r && a.shifts == b.shifts && a.n_exact == b.n_exact &&
         a.main_term == b.main_term && a.error == b.error && a.abs_error == b.abs_error &&
         a.sigma2 == b.sigma2 && a.explicit_bound == b.explicit_bound &&
         a.phi_pm1 == b.phi_pm1 && a.omega_pm1 == b.omega_pm1 && a.phi_ratio == b.phi_ratio;
}

std::string csv_string(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  write_csv(records, os);
  return os.str();
}

}  // namespace

TEST_CASE("TuplePolicy parsing") {
  REQUIRE(TuplePolicy::parse("canonical").kind == PolicyKind::canonical);
  TuplePolicy f = TuplePolicy::parse("fixed:1,2");
  REQUIRE(f.kind == PolicyKind::fixed);
  REQUIRE(f.fixed_shifts == std::vector<u64>{1, 2});
  TuplePolicy r = TuplePolicy::parse("random:5");
  REQUIRE(r.kind == PolicyKind::random);
  REQUIRE(r.random_count == 5);

  REQUIRE_THROWS_AS(TuplePolicy::parse("random:0"), std::invalid_argument);
  REQUIRE_THROWS_AS(TuplePolicy::parse("random:x"), std::invalid_argument);
  REQUIRE_THROWS_AS(TuplePolicy::parse("fixed:"), std::invalid_argument);
  REQUIRE_THROWS_AS(TuplePolicy::parse("fixed:1,a"), std::invalid_argument);
  REQUIRE_THROWS_AS(TuplePolicy::parse("nonsense"), std::invalid_argument);

  REQUIRE(TuplePolicy::parse("fixed:3,9").str() == "fixed:3,9");
  REQUIRE(TuplePolicy::parse("random:7").str() == "random:7");
  REQUIRE(TuplePolicy::canonical().str() == "canonical");
}

TEST_CASE("policy_tuples per prime") {
  REQUIRE(policy_tuples(TuplePolicy::canonical(), 2, 7, 0) ==
          std::vector<std::vector<u64>>{{1, 2}});

  std::string warning;
  REQUIRE(policy_tuples(TuplePolicy::canonical(), 7, 7, 0, &warning).empty());
  REQUIRE_FALSE(warning.empty());

  warning.clear();
  REQUIRE(policy_tuples(TuplePolicy::fixed({5, 8}), 2, 7, 0, &warning).empty());
  REQUIRE(warning.find("8") != std::string::npos);  // 8 outside 1..6, never reduced mod p

  auto a = policy_tuples(TuplePolicy::random(3), 2, 101, 42);
  auto b = policy_tuples(TuplePolicy::random(3), 2, 101, 42);
  REQUIRE(a == b);
  REQUIRE(a.size() == 3);
  for (const auto& shifts : a) {
    REQUIRE(shifts.size() == 2);
    REQUIRE(shifts[0] < shifts[1]);  // ascending and distinct
    REQUIRE(shifts[0] >= 1);
    REQUIRE(shifts[1] <= 100);
  }
  auto c = policy_tuples(TuplePolicy::random(3), 2, 101, 43);
  REQUIRE(a != c);
}

TEST_CASE("sweep over a tiny range") {
  auto records = sweep(5, 13, 1, TuplePolicy::canonical());
  REQUIRE(records.size() == 4);
  std::vector<u64> ps, ns;
  for (const auto& rec : records) {
    ps.push_back(rec.p);
    ns.push_back(rec.n_exact);
    REQUIRE(rec.r == 1);
    REQUIRE(rec.shifts == std::vector<u64>{1});
    REQUIRE(rec.abs_error == std::abs(rec.error));
    REQUIRE_FALSE(rec.sigma2.has_value());
    REQUIRE_FALSE(rec.phi_ratio.has_value());  // all below 17
  }
  REQUIRE(ps == std::vector<u64>{5, 7, 11, 13});
  REQUIRE(ns == std::vector<u64>{1, 2, 1, 1});
}

TEST_CASE("sweep fills phi_ratio from 17 on") {
  auto records = sweep(5, 30, 1, TuplePolicy::canonical());
  for (const auto& rec : records) {
    REQUIRE(rec.phi_ratio.has_value() == (rec.p >= 17));
    if (rec.phi_ratio) {
      double expected = static_cast<double>(rec.phi_pm1) *
                        std::log(std::log(static_cast<double>(rec.p))) /
                        static_cast<double>(rec.p);
      REQUIRE(*rec.phi_ratio == expected);
    }
  }
}

TEST_CASE("sweep with decomposition cross-checks the counts") {
  SweepConfig cfg;
  cfg.decompose = true;
  auto records = sweep(5, 40, 1, TuplePolicy::canonical(), cfg);
  for (const auto& rec : records) {
    REQUIRE(rec.sigma2.has_value());
    REQUIRE(rec.explicit_bound.has_value());
    REQUIRE(std::abs(*rec.sigma2) <= *rec.explicit_bound + kDecompTol);
  }
}

TEST_CASE("sweep validates its arguments") {
  REQUIRE_THROWS_AS(sweep(5, 30, 0, TuplePolicy::canonical()), std::invalid_argument);
  REQUIRE_THROWS_AS(sweep(5, 30, 2, TuplePolicy::fixed({1})), std::invalid_argument);
}

TEST_CASE("sweep output does not depend on the worker count") {
  SweepConfig one;
  one.workers = 1;
  SweepConfig four;
  four.workers = 4;
  auto a = sweep(5, 80, 2, TuplePolicy::random(2), one);
  auto b = sweep(5, 80, 2, TuplePolicy::random(2), four);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(records_equal(a[i], b[i]));
  REQUIRE(csv_string(a) == csv_string(b));
}

TEST_CASE("random sweeps are reproducible by seed") {
  SweepConfig cfg;
  cfg.seed = 9;
  auto a = sweep(5, 60, 2, TuplePolicy::random(3), cfg);
  auto b = sweep(5, 60, 2, TuplePolicy::random(3), cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(records_equal(a[i], b[i]));
  cfg.seed = 10;
  auto c = sweep(5, 60, 2, TuplePolicy::random(3), cfg);
  REQUIRE(csv_string(a) != csv_string(c));
}

TEST_CASE("fit recovers a planted exponent") {
  std::vector<SweepRecord> records;
  for (u64 p : primes_in_range(100, 1000)) {
    SweepRecord rec;
    rec.p = p;
    rec.abs_error = std::sqrt(static_cast<double>(p));
    records.push_back(rec);
  }
  FitResult fit = fit_error_exponent(records, 0.1);
  REQUIRE(fit.slope == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(fit.intercept == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(fit.r_value == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(fit.sample_count == records.size());
  REQUIRE(fit.zero_error_count == 0);
  // Planted p^0.5 against p^0.6 normalization: largest at the smallest p.
  REQUIRE(fit.max_normalized_error == Catch::Approx(std::pow(101.0, -0.1)).margin(1e-12));
}

TEST_CASE("fit handles constants and excludes exact zeros") {
  std::vector<SweepRecord> records;
  for (u64 p : {101ull, 211ull, 307ull, 401ull, 503ull}) {
    SweepRecord rec;
    rec.p = p;
    rec.abs_error = 3.0;
    records.push_back(rec);
  }
  SweepRecord zero;
  zero.p = 601;
  zero.abs_error = 0.0;
  records.push_back(zero);
  FitResult fit = fit_error_exponent(records, 0.1);
  REQUIRE(fit.slope == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(fit.sample_count == 5);
  REQUIRE(fit.zero_error_count == 1);

  std::vector<SweepRecord> too_few(records.begin() + 4, records.end());
  REQUIRE_THROWS_AS(fit_error_exponent(too_few, 0.1), std::invalid_argument);
}

TEST_CASE("CSV writer emits the fixed header and round-trips") {
  SweepConfig cfg;
  cfg.decompose = true;
  auto records = sweep(5, 60, 1, TuplePolicy::canonical(), cfg);
  std::string text = csv_string(records);
  REQUIRE(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  REQUIRE(text.find("\r") == std::string::npos);

  fs::path path = fs::temp_directory_path() / "golomb_roundtrip_test.csv";
  ReportMeta meta;
  write_report(records, std::nullopt, meta, ReportFormat::csv, path.string());
  auto loaded = read_records(path.string());
  fs::remove(path);
  REQUIRE(loaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) REQUIRE(records_equal(records[i], loaded[i]));
}

TEST_CASE("JSON writer round-trips and parses as strict JSON") {
  SweepConfig cfg;
  cfg.seed = 3;
  auto records = sweep(5, 60, 2, TuplePolicy::random(2), cfg);
  FitResult fit = fit_error_exponent(records, 0.1);

  ReportMeta meta;
  meta.min_p = 5;
  meta.max_p = 60;
  meta.r = 2;
  meta.policy = "random:2";
  meta.seed = 3;

  std::ostringstream os;
  write_json(records, fit, meta, os);
  std::string text = os.str();

  // Independent parser sees the same structure.
  nlohmann::json doc = nlohmann::json::parse(text);
  REQUIRE(doc.at("meta").at("version").get<std::string>() == kVersion);
  REQUIRE(doc.at("meta").at("seed").get<u64>() == 3);
  REQUIRE(doc.at("meta").at("config").at("policy").get<std::string>() == "random:2");
  REQUIRE(doc.at("meta").at("config").at("max").get<u64>() == 60);
  REQUIRE(doc.at("records").size() == records.size());
  REQUIRE(doc.at("fit").at("sample_count").get<std::size_t>() == fit.sample_count);
  REQUIRE(doc.at("fit").at("slope").get<double>() == fit.slope);

  fs::path path = fs::temp_directory_path() / "golomb_roundtrip_test.json";
  write_report(records, fit, meta, ReportFormat::json, path.string());
  auto loaded = read_records(path.string());
  fs::remove(path);
  REQUIRE(loaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) REQUIRE(records_equal(records[i], loaded[i]));

  // Byte-stable for identical input.
  std::ostringstream os2;
  write_json(records, fit, meta, os2);
  REQUIRE(text == os2.str());
}

TEST_CASE("doubles survive the 17-digit round trip") {
  for (double v : {1.0 / 3.0, 4.0 / 7.0, 3.141592653589793, 1e-300, 0.0, -2.5e17}) {
    REQUIRE(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("read_records rejects malformed input") {
  fs::path path = fs::temp_directory_path() / "golomb_bad_input_test.csv";
  {
    std::ofstream os(path);
    os << "p,r,wrong\n1,2,3\n";
  }
  REQUIRE_THROWS_AS(read_records(path.string()), std::runtime_error);
  fs::remove(path);
  REQUIRE_THROWS_AS(read_records((fs::temp_directory_path() / "golomb_missing.csv").string()),
                    std::runtime_error);
}

TEST_CASE("verify_indicator over a small range") {
  VerifyOutcome out = verify_indicator(3, 60, {});
  u64 expected_checks = 0;
  for (u64 p : primes_in_range(3, 60)) expected_checks += p;
  REQUIRE(out.checks == expected_checks);
  REQUIRE(out.failures == 0);
  REQUIRE(out.first_failure.empty());
}

TEST_CASE("verify_weil over a small range") {
  VerifyConfig cfg;
  cfg.samples = 20;
  cfg.seed = 5;
  VerifyOutcome out = verify_weil(5, 60, cfg);
  REQUIRE(out.checks == 20 * primes_in_range(5, 60).size());
  REQUIRE(out.failures == 0);
}

TEST_CASE("verify_decomposition over a small range") {
  VerifyConfig cfg;
  cfg.random_tuples = 1;
  VerifyOutcome out = verify_decomposition(5, 40, cfg);
  REQUIRE(out.failures == 0);
  REQUIRE(out.skipped == 0);
  REQUIRE(out.checks > 0);

  cfg.budget = 100;  // refuses everything but the very smallest primes
  VerifyOutcome tight = verify_decomposition(5, 40, cfg);
  REQUIRE(tight.skipped > 0);
  REQUIRE(tight.failures == 0);
}

TEST_CASE("verify dispatches all kinds") {
  VerifyConfig cfg;
  cfg.samples = 5;
  auto outcomes = verify(VerifyKind::all, 5, 30, cfg);
  REQUIRE(outcomes.size() == 3);
  REQUIRE(outcomes[0].kind == "indicator");
  REQUIRE(outcomes[1].kind == "weil");
  REQUIRE(outcomes[2].kind == "decomposition");
  for (const auto& out : outcomes) REQUIRE(out.failures == 0);

  REQUIRE(verify(VerifyKind::weil, 5, 30, cfg).size() == 1);
  REQUIRE_THROWS_AS(parse_verify_kind("nope"), std::invalid_argument);
}
