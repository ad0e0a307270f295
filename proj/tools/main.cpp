// Command-line front end: count, sweep, verify, fit.
// Exit codes: 0 success, 1 verification or runtime failure, 2 usage error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "golomb/golomb.hpp"

namespace {

using namespace golomb;

struct CountArgs {
  u64 p = 0;
  std::vector<u64> shifts;
  bool decompose = false;
  u64 budget = kDefaultBudget;
  int workers = 0;
};

struct SweepArgs {
  u64 min_p = 0, max_p = 0;
  u32 r = 1;
  std::string policy = "canonical";
  u64 seed = 0;
  bool decompose = false;
  std::string out_path;
  std::string format = "csv";
  u64 budget = kDefaultBudget;
  int workers = 0;
};

struct VerifyArgs {
  std::string kind;
  u64 min_p = 0, max_p = 0;
  u64 seed = 0;
  u64 samples = 100;
  u64 budget = kDefaultBudget;
  int workers = 0;
};

struct FitArgs {
  std::string in_path;
  double epsilon = 0.1;
};

int run_count(const CountArgs& args) {
  PrimeContext ctx = build_context(args.p);
  TargetTuple tuple(args.shifts, ctx);
  u64 n = count_bruteforce(tuple, ctx);
  double mt = main_term(tuple, ctx);
  double bound = explicit_error_bound(tuple, ctx);

  std::string decomposition = "null";
  if (args.decompose) {
    CountBreakdown b = sigma_split(tuple, ctx, DecompositionConfig{args.budget, args.workers});
    if (b.n_exact != n)
      throw std::runtime_error("count: decomposition count " + std::to_string(b.n_exact) +
                               " disagrees with brute-force count " + std::to_string(n));
    decomposition = "{\"sigma1\": " + format_double(b.sigma1) +
                    ", \"sigma2\": " + format_double(b.sigma2) +
                    ", \"sigma1_exact_form\": " + format_double(b.sigma1_exact_form) +
                    ", \"n_from_split\": " + std::to_string(b.n_exact) + "}";
  }

  std::string shifts_json = "[";
  for (std::size_t i = 0; i < tuple.shifts.size(); ++i) {
    if (i) shifts_json += ", ";
    shifts_json += std::to_string(tuple.shifts[i]);
  }
  shifts_json += "]";

  std::cout << "{\"p\": " << ctx.p << ", \"r\": " << tuple.r() << ", \"shifts\": " << shifts_json
            << ", \"n_exact\": " << n << ", \"main_term\": " << format_double(mt)
            << ", \"error\": " << format_double(static_cast<double>(n) - mt)
            << ", \"explicit_bound\": " << format_double(bound)
            << ", \"decomposition\": " << decomposition << "}\n";
  return 0;
}

int run_sweep(const SweepArgs& args) {
  TuplePolicy policy = TuplePolicy::parse(args.policy);
  ReportFormat format = parse_format(args.format);
  SweepConfig cfg;
  cfg.seed = args.seed;
  cfg.decompose = args.decompose;
  cfg.budget = args.budget;
  cfg.workers = args.workers;
  auto records = sweep(args.min_p, args.max_p, args.r, policy, cfg);

  ReportMeta meta;
  meta.min_p = args.min_p;
  meta.max_p = args.max_p;
  meta.r = args.r;
  meta.policy = policy.str();
  meta.decompose = args.decompose;
  meta.seed = args.seed;
  meta.budget = args.budget;
  write_report(records, std::nullopt, meta, format, args.out_path);
  std::fprintf(stderr, "wrote %zu records to %s\n", records.size(), args.out_path.c_str());
  return 0;
}

int run_verify(const VerifyArgs& args) {
  VerifyKind kind = parse_verify_kind(args.kind);
  VerifyConfig cfg;
  cfg.seed = args.seed;
  cfg.samples = args.samples;
  cfg.budget = args.budget;
  cfg.workers = args.workers;
  auto outcomes = verify(kind, args.min_p, args.max_p, cfg);
  u64 failures = 0;
  for (const auto& out : outcomes) {
    std::cout << out.kind << ": " << out.checks << " checks, " << out.failures << " failures";
    if (out.skipped > 0) std::cout << ", " << out.skipped << " skipped (over budget)";
    std::cout << "\n";
    if (out.failures > 0) std::cout << "  first failure: " << out.first_failure << "\n";
    failures += out.failures;
  }
  return failures == 0 ? 0 : 1;
}

int run_fit(const FitArgs& args) {
  auto records = read_records(args.in_path);
  FitResult fit = fit_error_exponent(records, args.epsilon);
  std::cout << "{\"slope\": " << format_double(fit.slope)
            << ", \"intercept\": " << format_double(fit.intercept)
            << ", \"sample_count\": " << fit.sample_count
            << ", \"r_value\": " << format_double(fit.r_value)
            << ", \"max_normalized_error\": " << format_double(fit.max_normalized_error)
            << ", \"zero_error_count\": " << fit.zero_error_count
            << ", \"epsilon\": " << format_double(args.epsilon) << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counts of primitive roots beta mod p with every a_i - beta again a primitive root"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a TOML/INI file");

  CountArgs count_args;
  auto* count = app.add_subcommand("count", "count one prime and shift tuple");
  count->add_option("--p", count_args.p, "odd prime modulus")->required();
  count->add_option("--shifts", count_args.shifts, "shifts a1,a2,... in 1..p-1")
      ->required()
      ->delimiter(',');
  count->add_flag("--decompose", count_args.decompose, "also run the character-sum split");
  count->add_option("--budget", count_args.budget, "term-evaluation budget for the split");
  count->add_option("--workers", count_args.workers,
                    "worker threads (0 = auto; GOLOMB_WORKERS overrides)");

  SweepArgs sweep_args;
  auto* sw = app.add_subcommand("sweep", "count across a prime range and write records");
  sw->add_option("--min", sweep_args.min_p, "lower end of the prime range")->required();
  sw->add_option("--max", sweep_args.max_p, "upper end of the prime range")->required();
  sw->add_option("--r", sweep_args.r, "tuple size r >= 1")->required();
  sw->add_option("--policy", sweep_args.policy, "canonical | fixed:a1,a2,... | random:count");
  sw->add_option("--seed", sweep_args.seed, "seed for random tuple policies");
  sw->add_flag("--decompose", sweep_args.decompose, "fill sigma2 and the explicit bound");
  sw->add_option("--out", sweep_args.out_path, "output path")->required();
  sw->add_option("--format", sweep_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sw->add_option("--budget", sweep_args.budget, "term-evaluation budget per decomposition");
  sw->add_option("--workers", sweep_args.workers,
                 "worker threads (0 = auto; GOLOMB_WORKERS overrides)");

  VerifyArgs verify_args;
  auto* vf = app.add_subcommand("verify", "run property suites over a prime range");
  vf->add_option("--kind", verify_args.kind, "indicator | weil | decomposition | all")
      ->required();
  vf->add_option("--min", verify_args.min_p, "lower end of the prime range")->required();
  vf->add_option("--max", verify_args.max_p, "upper end of the prime range")->required();
  vf->add_option("--seed", verify_args.seed, "seed for sampled configurations");
  vf->add_option("--samples", verify_args.samples, "sampled configurations per prime");
  vf->add_option("--budget", verify_args.budget, "term-evaluation budget per decomposition");
  vf->add_option("--workers", verify_args.workers,
                 "worker threads (0 = auto; GOLOMB_WORKERS overrides)");

  FitArgs fit_args;
  auto* ft = app.add_subcommand("fit", "fit the error exponent from sweep records");
  ft->add_option("--in", fit_args.in_path, "records file (csv or json)")->required();
  ft->add_option("--epsilon", fit_args.epsilon, "normalization exponent margin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (count->parsed()) return run_count(count_args);
    if (sw->parsed()) return run_sweep(sweep_args);
    if (vf->parsed()) return run_verify(verify_args);
    if (ft->parsed()) return run_fit(fit_args);
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
