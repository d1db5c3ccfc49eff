// Command line front end: generate corpora, solve single instances, run
// benchmarks and the oracle sweep.
//
// Exit codes: 0 success, 1 usage or solver error, 2 verification failure,
// 3 I/O error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dotmark/errors.hpp"
#include "dotmark/harness.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitVerification = 2;
constexpr int kExitIo = 3;

struct Options {
  // generate
  std::vector<int> classes;
  int resolution = 32;
  std::uint64_t seed = 0;
  std::string out;
  // solve
  std::string file_a, file_b;
  std::string method = "shielding";
  // bench / verify
  std::string corpus;
  std::vector<std::string> methods{"tps", "shortlist", "shielding"};
  int workers = 1;
  bool oversubscribe = false;
  int max_pairs = 0;
  // solver parameters
  int sl_s = 0;
  double sl_p = 5.0;
  int sl_k = 5;
  double aha_tol = 1e-6;
  int aha_q = 4;
};

dotmark::BenchConfig bench_config(const Options& o) {
  dotmark::BenchConfig config;
  config.resolution = o.resolution;
  config.methods.clear();
  for (const std::string& m : o.methods) config.methods.push_back(dotmark::method_from_name(m));
  config.workers = o.workers;
  config.allow_oversubscribe = o.oversubscribe;
  config.shortlist.list_length = o.sl_s;
  config.shortlist.scan_percent = o.sl_p;
  config.shortlist.candidate_quota = o.sl_k;
  config.shortlist.validate();
  config.aha.tol = o.aha_tol;
  config.aha.q = o.aha_q;
  if (o.max_pairs > 0) {
    const auto pairs = dotmark::all_pairs();
    config.pairs.assign(pairs.begin(), pairs.begin() + std::min<std::size_t>(o.max_pairs, pairs.size()));
  }
  return config;
}

int run_generate(const Options& o) {
  for (const int c : o.classes) {
    dotmark::ClassSpec spec;
    spec.class_id = c;
    spec.resolution = o.resolution;
    spec.seed = o.seed;
    dotmark::generate_class(o.out, spec);
    std::cout << "wrote " << dotmark::class_directory(o.out, c).string() << "\n";
  }
  return 0;
}

int run_solve(const Options& o) {
  const dotmark::Instance instance(dotmark::load_grid_csv(o.file_a), dotmark::load_grid_csv(o.file_b));
  const dotmark::RunRecord r = dotmark::solve_pair(instance, dotmark::method_from_name(o.method), bench_config(o));
  std::cout << dotmark::to_json(r).dump(2) << "\n";
  return r.status == dotmark::Verification::Failed ? kExitVerification : 0;
}

int run_bench(const Options& o) {
  dotmark::BenchConfig config = bench_config(o);
  config.reproducer_dir = std::filesystem::path(o.out) / "reproducers";
  config.on_record = [](const dotmark::RunRecord& r) {
    std::fprintf(stderr, "%s %d-%d %-9s %10.4fs  %s\n", dotmark::class_name(r.class_id).c_str(), r.image_a,
                 r.image_b, r.method.c_str(), r.seconds, dotmark::verification_name(r.status).c_str());
  };
  const dotmark::Report report = dotmark::run_benchmark(o.corpus, o.classes, config);
  dotmark::emit_report(report, o.out);
  std::cout << dotmark::format_runtime_table(report);
  if (std::find(config.methods.begin(), config.methods.end(), dotmark::Method::Aha) != config.methods.end()) {
    std::cout << "\n" << dotmark::format_error_table(report);
  }
  if (report.failed()) {
    std::cerr << "verification FAILED; reproducers in " << config.reproducer_dir.string() << "\n";
    return kExitVerification;
  }
  return 0;
}

int run_verify(const Options& o) {
  dotmark::BenchConfig config = bench_config(o);
  if (!o.out.empty()) config.reproducer_dir = o.out;
  const dotmark::VerifySummary s = dotmark::verify_corpus(o.corpus, o.resolution, config);
  for (const std::string& m : s.messages) std::cerr << m << "\n";
  std::cout << s.instances << " instances checked against the oracle, " << s.failures << " failures\n";
  return s.failures == 0 ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DOTmark-style optimal transport benchmark"};
  app.require_subcommand(1);
  Options o;

  const auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--sl-s", o.sl_s, "shortlist length (0: default rule)");
    cmd->add_option("--sl-p", o.sl_p, "shortlist scan percentage");
    cmd->add_option("--sl-k", o.sl_k, "shortlist candidate quota");
    cmd->add_option("--aha-tol", o.aha_tol, "AHA gradient tolerance (sup norm)");
    cmd->add_option("--aha-q", o.aha_q, "AHA sampling factor of the reported quadrature cost");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a generated class to a corpus directory");
  generate->add_option("--class", o.classes, "class ids 1-8")->required()->delimiter(',')->check(CLI::Range(1, 8));
  generate->add_option("--res", o.resolution, "resolution")->check(CLI::PositiveNumber);
  generate->add_option("--seed", o.seed, "seed");
  generate->add_option("--out", o.out, "corpus directory")->required();

  CLI::App* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("--a", o.file_a, "source grid CSV")->required();
  solve->add_option("--b", o.file_b, "target grid CSV")->required();
  solve->add_option("--method", o.method, "tps, shortlist, shielding or aha")
      ->check(CLI::IsMember({"tps", "shortlist", "shielding", "aha"}));
  add_solver_flags(solve);

  CLI::App* bench = app.add_subcommand("bench", "solve all pairs of a corpus and write reports");
  bench->add_option("--corpus", o.corpus, "corpus directory")->required();
  bench->add_option("--methods", o.methods, "comma-separated methods")->delimiter(',');
  bench->add_option("--res", o.resolution, "resolution")->check(CLI::PositiveNumber);
  bench->add_option("--classes", o.classes, "class ids (default: all complete classes)")->delimiter(',');
  bench->add_option("--out", o.out, "report directory")->required();
  bench->add_option("--workers", o.workers, "concurrent solves")->check(CLI::PositiveNumber);
  bench->add_flag("--allow-oversubscribe", o.oversubscribe, "allow more workers than hardware threads");
  bench->add_option("--max-pairs", o.max_pairs, "only the first N of the 45 pairs per class");
  add_solver_flags(bench);

  CLI::App* verify = app.add_subcommand("verify", "oracle sweep over coarsened corpus instances");
  verify->add_option("--corpus", o.corpus, "corpus directory")->required();
  verify->add_option("--res", o.resolution, "resolution of the files to read");
  verify->add_option("--out", o.out, "where to dump reproducers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return run_generate(o);
    if (solve->parsed()) return run_solve(o);
    if (bench->parsed()) return run_bench(o);
    if (verify->parsed()) return run_verify(o);
  } catch (const dotmark::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const dotmark::ParseError& e) {
    std::cerr << "malformed grid file (row " << e.row() << ", column " << e.column() << "): " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
