#include "dotmark/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "dotmark/errors.hpp"
#include "dotmark/oracle.hpp"
#include "dotmark/shielding.hpp"
#include "dotmark/simplex.hpp"

namespace dotmark {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// JSON has no infinities; an infinite RWE is written as the string "inf".
json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return *v;
}

std::optional<double> read_optional_number(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InvalidArgument("not a number: " + s);
  }
  return j.get<double>();
}

// Copies every key of j not in known into a fresh object.
json unknown_fields(const json& j, std::initializer_list<std::string_view> known) {
  json extra = json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) extra[it.key()] = it.value();
  }
  return extra;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::Tps: return "tps";
    case Method::Shortlist: return "shortlist";
    case Method::Shielding: return "shielding";
    case Method::Aha: return "aha";
  }
  throw InvalidArgument("unknown method");
}

Method method_from_name(std::string_view name) {
  for (const Method m : {Method::Tps, Method::Shortlist, Method::Shielding, Method::Aha}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidArgument("unknown method: " + std::string(name));
}

std::string verification_name(Verification status) {
  switch (status) {
    case Verification::ExactMatch: return "exact-match";
    case Verification::CertifiedOptimal: return "certified-optimal";
    case Verification::AhaApprox: return "aha-approx";
    case Verification::Failed: return "FAILED";
  }
  throw InvalidArgument("unknown verification status");
}

Verification verification_from_name(std::string_view name) {
  for (const Verification v :
       {Verification::ExactMatch, Verification::CertifiedOptimal, Verification::AhaApprox, Verification::Failed}) {
    if (verification_name(v) == name) return v;
  }
  throw InvalidArgument("unknown verification status: " + std::string(name));
}

bool Report::failed() const {
  return std::any_of(records.begin(), records.end(),
                     [](const RunRecord& r) { return r.status == Verification::Failed; });
}

std::vector<MethodAverage> compute_averages(const std::vector<RunRecord>& records,
                                            const std::vector<std::string>& methods) {
  std::vector<int> classes;
  for (const RunRecord& r : records) classes.push_back(r.class_id);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  classes.push_back(0);

  std::vector<MethodAverage> out;
  for (const int c : classes) {
    for (const std::string& method : methods) {
      MethodAverage avg;
      avg.class_id = c;
      avg.method = method;
      double pe = 0.0, rwe = 0.0;
      bool has_pe = true, has_rwe = true;
      for (const RunRecord& r : records) {
        if (r.method != method || (c != 0 && r.class_id != c)) continue;
        ++avg.count;
        avg.seconds += r.seconds;
        avg.iterations += static_cast<double>(r.iterations);
        avg.pivots += static_cast<double>(r.pivots);
        if (r.pe) pe += *r.pe; else has_pe = false;
        if (r.rwe) rwe += *r.rwe; else has_rwe = false;
      }
      if (avg.count == 0) continue;
      avg.seconds /= avg.count;
      avg.iterations /= avg.count;
      avg.pivots /= avg.count;
      if (has_pe) avg.pe = pe / avg.count;
      if (has_rwe) avg.rwe = rwe / avg.count;
      out.push_back(avg);
    }
  }
  return out;
}

json to_json(const RunRecord& r) {
  json j = r.extra;
  j["class_id"] = r.class_id;
  j["resolution"] = r.resolution;
  j["image_a"] = r.image_a;
  j["image_b"] = r.image_b;
  j["method"] = r.method;
  j["seconds"] = r.seconds;
  j["objective"] = r.objective;
  j["real_objective"] = r.real_objective;
  j["w2"] = r.w2;
  j["iterations"] = r.iterations;
  j["pivots"] = r.pivots;
  j["pe"] = optional_number(r.pe);
  j["rwe"] = optional_number(r.rwe);
  j["status"] = verification_name(r.status);
  return j;
}

RunRecord run_record_from_json(const json& j) {
  try {
    RunRecord r;
    r.class_id = j.at("class_id").get<int>();
    r.resolution = j.at("resolution").get<int>();
    r.image_a = j.at("image_a").get<int>();
    r.image_b = j.at("image_b").get<int>();
    r.method = j.at("method").get<std::string>();
    r.seconds = j.at("seconds").get<double>();
    r.objective = j.at("objective").get<std::int64_t>();
    r.real_objective = j.at("real_objective").get<double>();
    r.w2 = j.at("w2").get<double>();
    r.iterations = j.at("iterations").get<std::int64_t>();
    r.pivots = j.at("pivots").get<std::int64_t>();
    r.pe = read_optional_number(j.at("pe"));
    r.rwe = read_optional_number(j.at("rwe"));
    r.status = verification_from_name(j.at("status").get<std::string>());
    r.extra = unknown_fields(j, {"class_id", "resolution", "image_a", "image_b", "method", "seconds", "objective",
                                 "real_objective", "w2", "iterations", "pivots", "pe", "rwe", "status"});
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("run record: ") + e.what());
  }
}

namespace {

json to_json(const MethodAverage& a) {
  return {{"class_id", a.class_id},
          {"method", a.method},
          {"count", a.count},
          {"seconds", a.seconds},
          {"iterations", a.iterations},
          {"pivots", a.pivots},
          {"pe", optional_number(a.pe)},
          {"rwe", optional_number(a.rwe)}};
}

MethodAverage average_from_json(const json& j) {
  MethodAverage a;
  a.class_id = j.at("class_id").get<int>();
  a.method = j.at("method").get<std::string>();
  a.count = j.at("count").get<int>();
  a.seconds = j.at("seconds").get<double>();
  a.iterations = j.at("iterations").get<double>();
  a.pivots = j.at("pivots").get<double>();
  a.pe = read_optional_number(j.at("pe"));
  a.rwe = read_optional_number(j.at("rwe"));
  return a;
}

}  // namespace

json to_json(const Report& report) {
  json j = report.extra;
  j["schema_version"] = report.schema_version;
  j["resolution"] = report.resolution;
  j["methods"] = report.methods;
  j["timing_note"] = report.timing_note;
  j["averages"] = json::array();
  for (const MethodAverage& a : report.averages) j["averages"].push_back(to_json(a));
  j["records"] = json::array();
  for (const RunRecord& r : report.records) j["records"].push_back(to_json(r));
  return j;
}

Report report_from_json(const json& j) {
  Report report;
  try {
    report.schema_version = j.at("schema_version").get<int>();
    if (report.schema_version > kReportSchemaVersion) {
      throw InvalidArgument("report schema version " + std::to_string(report.schema_version) + " is newer than " +
                            std::to_string(kReportSchemaVersion));
    }
    report.resolution = j.at("resolution").get<int>();
    report.methods = j.at("methods").get<std::vector<std::string>>();
    report.timing_note = j.at("timing_note").get<std::string>();
    for (const json& a : j.at("averages")) report.averages.push_back(average_from_json(a));
    for (const json& r : j.at("records")) report.records.push_back(run_record_from_json(r));
    report.extra = unknown_fields(j, {"schema_version", "resolution", "methods", "timing_note", "averages", "records"});
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("report: ") + e.what());
  }
  if (compute_averages(report.records, report.methods) != report.averages) {
    throw InvalidArgument("report: stored averages do not match the records");
  }
  return report;
}

// ---- corpus files ----

std::string corpus_file_name(int resolution, int member) {
  if (member < 1 || member > kImagesPerClass) throw InvalidArgument("member index must be in 1..10");
  return "data" + std::to_string(resolution) + "_" + std::to_string(1000 + member) + ".csv";
}

std::filesystem::path class_directory(const std::filesystem::path& corpus, int class_id) {
  return corpus / class_name(class_id);
}

void write_class(const std::filesystem::path& corpus, const ClassSpec& spec, const std::vector<GridMeasure>& members) {
  if (members.size() != static_cast<std::size_t>(kImagesPerClass)) {
    throw InvalidArgument("write_class: a class has ten members");
  }
  const std::filesystem::path dir = class_directory(corpus, spec.class_id);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  json files = json::array();
  for (int k = 1; k <= kImagesPerClass; ++k) {
    const std::string name = corpus_file_name(spec.resolution, k);
    save_grid_csv(members[k - 1], dir / name);
    files.push_back(class_name(spec.class_id) + "/" + name);
  }

  json entry = {{"class_id", spec.class_id},
                {"class_name", class_name(spec.class_id)},
                {"resolution", spec.resolution},
                {"seed", spec.seed},
                {"redistribution_fraction", spec.redistribution_fraction},
                {"target_mean", spec.target_mean},
                {"total_mass", members[0].total()},
                {"files", files}};
  if (spec.class_id >= 2 && spec.class_id <= 6) {
    const MaternParams m = spec.matern.value_or(default_matern(spec.class_id));
    entry["matern"] = {{"variance", m.variance}, {"smoothness", m.smoothness}, {"range", m.range}};
  }
  if (spec.class_id == 7) entry["scale_range"] = {{"lo", spec.scale_range.lo}, {"hi", spec.scale_range.hi}};

  const std::filesystem::path manifest_path = corpus / "manifest.json";
  json manifest = {{"schema_version", 1}, {"generator", "dotmark benchgen"}, {"classes", json::array()}};
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    try {
      manifest = json::parse(in);
    } catch (const json::exception& e) {
      throw IoError("corrupt manifest " + manifest_path.string() + ": " + e.what());
    }
  }
  json& classes = manifest["classes"];
  json kept = json::array();
  for (const json& c : classes) {
    if (c.value("class_id", 0) == spec.class_id && c.value("resolution", 0) == spec.resolution) continue;
    kept.push_back(c);
  }
  kept.push_back(entry);
  classes = kept;
  write_text(manifest_path, manifest.dump(2) + "\n");
}

std::vector<GridMeasure> generate_class(const std::filesystem::path& corpus, const ClassSpec& spec) {
  std::vector<GridMeasure> members = build_class(spec);
  write_class(corpus, spec, members);
  return members;
}

std::vector<GridMeasure> load_class(const std::filesystem::path& corpus, int class_id, int resolution) {
  const std::filesystem::path dir = class_directory(corpus, class_id);
  std::vector<GridMeasure> members;
  for (int k = 1; k <= kImagesPerClass; ++k) {
    const std::filesystem::path path = dir / corpus_file_name(resolution, k);
    if (!std::filesystem::exists(path)) throw IoError("missing corpus file " + path.string());
    members.push_back(load_grid_csv(path));
    if (members.back().resolution() != resolution) {
      throw IoError(path.string() + " is not " + std::to_string(resolution) + " x " + std::to_string(resolution));
    }
  }
  return members;
}

std::vector<int> available_classes(const std::filesystem::path& corpus, int resolution) {
  std::vector<int> found;
  for (int c = 1; c <= 10; ++c) {
    const std::filesystem::path dir = class_directory(corpus, c);
    bool complete = true;
    for (int k = 1; k <= kImagesPerClass && complete; ++k) {
      complete = std::filesystem::exists(dir / corpus_file_name(resolution, k));
    }
    if (complete) found.push_back(c);
  }
  return found;
}

// ---- benchmark ----

std::vector<std::pair<int, int>> all_pairs() {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 1; a <= kImagesPerClass; ++a) {
    for (int b = a + 1; b <= kImagesPerClass; ++b) pairs.emplace_back(a, b);
  }
  return pairs;
}

namespace {

void fill_exact(RunRecord& r, const SimplexSolution& s, const TransportProblem& problem) {
  r.objective = s.stats.objective;
  r.real_objective = static_cast<double>(s.stats.objective);
  r.w2 = unit_square_w2(s.stats.objective, problem.total_mass(), problem.resolution());
  r.pivots = s.stats.pivots;
  r.iterations = s.stats.pivots;
  r.status = s.stats.optimal ? Verification::CertifiedOptimal : Verification::Failed;
}

}  // namespace

RunRecord solve_pair(const Instance& instance, Method method, const BenchConfig& config) {
  RunRecord r;
  r.resolution = instance.resolution();
  r.method = method_name(method);
  if (method == Method::Aha) {
    const SemidiscreteTargets targets = make_targets(instance.target());
    const AhaResult result = minimize_phi(instance.source(), targets, config.aha);
    r.seconds = result.seconds;
    r.real_objective = result.plan_cost;
    r.w2 = result.w2();
    r.iterations = result.iterations;
    r.pivots = 0;
    r.pe = result.precision_error;
    r.status = Verification::AhaApprox;
    r.extra["semidiscrete_cost"] = result.cost;
    r.extra["quadrature_cost"] = result.quadrature_cost;
    r.extra["gradient_norm"] = result.gradient_norm;
    r.extra["lbfgs_status"] = result.status == LbfgsStatus::Converged        ? "converged"
                              : result.status == LbfgsStatus::IterationLimit ? "iteration-limit"
                                                                             : "line-search-failed";
    return r;
  }

  const TransportProblem problem(instance);
  const auto start = Clock::now();
  switch (method) {
    case Method::Tps: {
      const SimplexSolution s = solve_dense(problem);
      r.seconds = seconds_since(start);
      fill_exact(r, s, problem);
      break;
    }
    case Method::Shortlist: {
      const ShortlistSolution s = solve_shortlist(problem, config.shortlist);
      r.seconds = seconds_since(start);
      fill_exact(r, s, problem);
      r.extra["cleanup_pivots"] = s.cleanup_pivots;
      break;
    }
    case Method::Shielding: {
      const ShieldingSolution s = solve_shielded(problem);
      r.seconds = seconds_since(start);
      fill_exact(r, s, problem);
      r.iterations = static_cast<std::int64_t>(s.iterations.size());
      r.extra["certificate_fallbacks"] = s.certificate_fallbacks;
      break;
    }
    case Method::Aha: break;
  }
  return r;
}

namespace {

struct PairTask {
  int class_id;
  int a;
  int b;
};

bool agree_with(const Instance& instance, const std::vector<Method>& methods) {
  std::optional<std::int64_t> value;
  for (const Method m : methods) {
    if (!is_exact(m)) continue;
    try {
      const std::int64_t obj = solve_pair(instance, m, BenchConfig{}).objective;
      if (value && *value != obj) return false;
      value = obj;
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

std::vector<RunRecord> run_task(const PairTask& task, const std::vector<GridMeasure>& members,
                                const BenchConfig& config) {
  const Instance instance(members[task.a - 1], members[task.b - 1]);
  std::vector<RunRecord> out;
  std::optional<double> exact_w2;
  for (const Method m : config.methods) {
    RunRecord r;
    try {
      r = solve_pair(instance, m, config);
    } catch (const std::exception& e) {
      r = RunRecord{};
      r.resolution = instance.resolution();
      r.method = method_name(m);
      r.status = Verification::Failed;
      r.extra["error"] = e.what();
    }
    r.class_id = task.class_id;
    r.image_a = task.a;
    r.image_b = task.b;
    if (is_exact(m) && r.status != Verification::Failed && !exact_w2) exact_w2 = r.w2;
    out.push_back(std::move(r));
  }

  // Cross-check the exact objectives.
  std::vector<RunRecord*> exact;
  for (RunRecord& r : out) {
    if (is_exact(method_from_name(r.method))) exact.push_back(&r);
  }
  bool agree = true;
  for (const RunRecord* r : exact) {
    agree = agree && r->status != Verification::Failed && r->objective == exact.front()->objective;
  }
  if (!agree) {
    for (RunRecord* r : exact) r->status = Verification::Failed;
    if (!config.reproducer_dir.empty()) {
      std::vector<Method> methods;
      for (const RunRecord* r : exact) methods.push_back(method_from_name(r->method));
      const Instance small =
          minimize_instance(instance, [&](const Instance& candidate) { return !agree_with(candidate, methods); });
      std::ostringstream what;
      what << "class " << task.class_id << " pair (" << task.a << ", " << task.b << ")";
      for (const RunRecord* r : exact) what << "\n" << r->method << ": " << r->objective;
      dump_reproducer(config.reproducer_dir /
                          ("class" + std::to_string(task.class_id) + "_pair" + std::to_string(task.a) + "_" +
                           std::to_string(task.b)),
                      small, what.str());
    }
  } else if (exact.size() >= 2) {
    for (RunRecord* r : exact) r->status = Verification::ExactMatch;
  }

  for (RunRecord& r : out) {
    if (r.method != method_name(Method::Aha) || r.status == Verification::Failed) continue;
    if (!exact_w2) {
      const TransportProblem problem(instance);
      const ShieldingSolution s = solve_shielded(problem);
      exact_w2 = unit_square_w2(s.stats.objective, problem.total_mass(), problem.resolution());
    }
    r.rwe = relative_wasserstein_error(r.w2, *exact_w2);
    r.extra["exact_w2"] = *exact_w2;
  }
  return out;
}

std::string timing_note(int workers) {
  return "Seconds are wall clock around the solver call only. Reading files, building the transport problem "
         "view and the AHA targets, and the AHA quadrature cost reported afterwards are not timed. Each solver "
         "runs single-threaded; " +
         std::to_string(workers) + " worker(s) ran concurrently.";
}

}  // namespace

Report run_benchmark(const std::map<int, std::vector<GridMeasure>>& classes, const BenchConfig& config) {
  if (config.workers < 1) throw InvalidArgument("workers must be at least 1");
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (static_cast<unsigned>(config.workers) > hw) {
    if (!config.allow_oversubscribe) {
      throw InvalidArgument("more workers (" + std::to_string(config.workers) + ") than hardware threads (" +
                            std::to_string(hw) + "); timings would be invalid");
    }
    std::cerr << "WARNING: " << config.workers << " workers on " << hw
              << " hardware threads; recorded times are not comparable\n";
  }
  for (const auto& [id, members] : classes) {
    if (members.size() != static_cast<std::size_t>(kImagesPerClass)) {
      throw InvalidArgument("class " + std::to_string(id) + " does not have ten members");
    }
  }
  const std::vector<std::pair<int, int>> pairs = config.pairs.empty() ? all_pairs() : config.pairs;
  for (const auto& [a, b] : pairs) {
    if (a < 1 || b > kImagesPerClass || a >= b) throw InvalidArgument("pairs must satisfy 1 <= a < b <= 10");
  }

  std::vector<PairTask> tasks;
  for (const auto& [id, members] : classes) {
    for (const auto& [a, b] : pairs) tasks.push_back({id, a, b});
  }
  std::vector<std::vector<RunRecord>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  std::exception_ptr failure;
  const auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      try {
        results[t] = run_task(tasks[t], classes.at(tasks[t].class_id), config);
        if (config.on_record) {
          const std::lock_guard lock(callback_mutex);
          for (const RunRecord& r : results[t]) config.on_record(r);
        }
      } catch (...) {
        const std::lock_guard lock(callback_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  if (config.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < config.workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Report report;
  for (const Method m : config.methods) report.methods.push_back(method_name(m));
  report.resolution = config.resolution;
  report.timing_note = timing_note(config.workers);
  for (auto& batch : results) {
    for (RunRecord& r : batch) report.records.push_back(std::move(r));
  }
  report.averages = compute_averages(report.records, report.methods);
  return report;
}

Report run_benchmark(const std::filesystem::path& corpus, const std::vector<int>& class_ids,
                     const BenchConfig& config) {
  std::vector<int> ids = class_ids.empty() ? available_classes(corpus, config.resolution) : class_ids;
  if (ids.empty()) throw IoError("no complete class at resolution " + std::to_string(config.resolution) + " in " +
                                 corpus.string());
  std::map<int, std::vector<GridMeasure>> classes;
  for (const int id : ids) classes[id] = load_class(corpus, id, config.resolution);
  return run_benchmark(classes, config);
}

// ---- reports ----

std::string format_runtime_table(const Report& report) {
  std::ostringstream os;
  os << "Average runtimes on " << report.resolution << " x " << report.resolution << " instances in seconds\n\n";
  os << "| Class |";
  for (const std::string& m : report.methods) os << " " << m << " |";
  os << "\n|---|";
  for (std::size_t k = 0; k < report.methods.size(); ++k) os << "---|";
  os << "\n";
  std::vector<int> classes;
  for (const MethodAverage& a : report.averages) {
    if (std::find(classes.begin(), classes.end(), a.class_id) == classes.end()) classes.push_back(a.class_id);
  }
  const auto cell = [&](int c, const std::string& m, auto field) {
    for (const MethodAverage& a : report.averages) {
      if (a.class_id == c && a.method == m) return format_number(field(a));
    }
    return std::string("-");
  };
  for (const int c : classes) {
    os << "| " << (c == 0 ? std::string("Overall") : class_name(c)) << " |";
    for (const std::string& m : report.methods) os << " " << cell(c, m, [](const MethodAverage& a) { return a.seconds; }) << " |";
    os << "\n";
  }
  os << "\nAverage iterations (shielding: restricted solves; aha: L-BFGS iterations; otherwise pivots)\n\n";
  os << "| Class |";
  for (const std::string& m : report.methods) os << " " << m << " |";
  os << "\n|---|";
  for (std::size_t k = 0; k < report.methods.size(); ++k) os << "---|";
  os << "\n";
  for (const int c : classes) {
    os << "| " << (c == 0 ? std::string("Overall") : class_name(c)) << " |";
    for (const std::string& m : report.methods) {
      os << " " << cell(c, m, [](const MethodAverage& a) { return a.iterations; }) << " |";
    }
    os << "\n";
  }
  os << "\n" << report.timing_note << "\n";
  return os.str();
}

std::string format_error_table(const Report& report) {
  std::ostringstream os;
  os << "AHA precision error (PE) and relative Wasserstein error (RWE), " << report.resolution << " x "
     << report.resolution << "\n\n| Class | PE | RWE |\n|---|---|---|\n";
  for (const MethodAverage& a : report.averages) {
    if (a.method != method_name(Method::Aha)) continue;
    os << "| " << (a.class_id == 0 ? std::string("Overall") : class_name(a.class_id)) << " | "
       << (a.pe ? format_number(*a.pe) : "-") << " | " << (a.rwe ? format_number(*a.rwe) : "-") << " |\n";
  }
  return os.str();
}

std::string format_instance_csv(const Report& report) {
  std::ostringstream os;
  os << "class_id,resolution,image_a,image_b,method,seconds,iterations,pivots,objective,real_objective,w2,pe,rwe,"
        "status\n";
  os.precision(17);
  for (const RunRecord& r : report.records) {
    os << r.class_id << ',' << r.resolution << ',' << r.image_a << ',' << r.image_b << ',' << r.method << ','
       << r.seconds << ',' << r.iterations << ',' << r.pivots << ',' << r.objective << ',' << r.real_objective << ','
       << r.w2 << ',';
    if (r.pe) os << *r.pe;
    os << ',';
    if (r.rwe) os << *r.rwe;
    os << ',' << verification_name(r.status) << '\n';
  }
  return os.str();
}

void emit_report(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(dir / "runtimes.md", format_runtime_table(report));
  write_text(dir / "aha_errors.md", format_error_table(report));
  write_text(dir / "instances.csv", format_instance_csv(report));
}

// ---- reproducers and verification ----

GridMeasure coarsen(const GridMeasure& measure, int factor) {
  const int n = measure.resolution();
  if (factor < 1 || n % factor != 0) throw InvalidArgument("coarsen: factor must divide the resolution");
  const int m = n / factor;
  std::vector<std::int64_t> out(static_cast<std::size_t>(m) * m, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) out[static_cast<std::size_t>(r / factor) * m + c / factor] += measure.at(r, c);
  }
  return GridMeasure(m, std::move(out));
}

namespace {

// Quadrant of a measure, or nothing if it is empty.
std::optional<GridMeasure> crop(const GridMeasure& g, int r0, int c0, int size) {
  std::vector<std::int64_t> out;
  std::int64_t total = 0;
  for (int r = r0; r < r0 + size; ++r) {
    for (int c = c0; c < c0 + size; ++c) {
      out.push_back(g.at(r, c));
      total += out.back();
    }
  }
  if (total == 0) return std::nullopt;
  return GridMeasure(size, std::move(out));
}

// Adds the difference in total mass to the largest pixel of the lighter measure.
Instance rebalance(GridMeasure a, GridMeasure b) {
  const auto topped = [](const GridMeasure& g, std::int64_t extra) {
    std::vector<std::int64_t> m(g.masses().begin(), g.masses().end());
    *std::max_element(m.begin(), m.end()) += extra;
    return GridMeasure(g.resolution(), std::move(m));
  };
  if (a.total() < b.total()) a = topped(a, b.total() - a.total());
  if (b.total() < a.total()) b = topped(b, a.total() - b.total());
  return Instance(std::move(a), std::move(b));
}

}  // namespace

Instance minimize_instance(const Instance& instance, const std::function<bool(const Instance&)>& still_fails) {
  Instance current = instance;
  bool progress = true;
  while (progress && current.resolution() > 1) {
    progress = false;
    const int n = current.resolution();
    std::vector<Instance> candidates;
    if (n % 2 == 0) candidates.emplace_back(coarsen(current.source(), 2), coarsen(current.target(), 2));
    const int half = n / 2;
    for (int q = 0; q < 4 && half >= 1; ++q) {
      const int r0 = (q / 2) * (n - half);
      const int c0 = (q % 2) * (n - half);
      auto a = crop(current.source(), r0, c0, half);
      auto b = crop(current.target(), r0, c0, half);
      if (a && b) candidates.push_back(rebalance(*a, *b));
    }
    for (const Instance& candidate : candidates) {
      if (still_fails(candidate)) {
        current = candidate;
        progress = true;
        break;
      }
    }
  }
  return current;
}

void dump_reproducer(const std::filesystem::path& dir, const Instance& instance, const std::string& description) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  save_grid_csv(instance.source(), dir / "a.csv");
  save_grid_csv(instance.target(), dir / "b.csv");
  write_text(dir / "README.txt", "Exact solvers disagree.\n" + description +
                                     "\n\nReplay: dotmark solve --a a.csv --b b.csv --method <tps|shortlist|shielding>\n");
}

bool exact_methods_agree(const Instance& instance) {
  return agree_with(instance, {Method::Tps, Method::Shortlist, Method::Shielding});
}

VerifySummary verify_corpus(const std::filesystem::path& corpus, int resolution, const BenchConfig& config) {
  VerifySummary summary;
  const std::vector<int> ids = available_classes(corpus, resolution);
  if (ids.empty()) throw IoError("no complete class at resolution " + std::to_string(resolution) + " in " +
                                 corpus.string());
  int factor = 1;
  while (resolution / factor > 8 || resolution % factor != 0) ++factor;
  for (const int id : ids) {
    std::vector<GridMeasure> members = load_class(corpus, id, resolution);
    for (GridMeasure& g : members) g = coarsen(g, factor);
    for (const auto& [a, b] : all_pairs()) {
      const Instance instance(members[a - 1], members[b - 1]);
      ++summary.instances;
      const std::int64_t expected = oracle_solve(instance);
      for (const Method m : {Method::Tps, Method::Shortlist, Method::Shielding}) {
        std::string problem;
        try {
          const RunRecord r = solve_pair(instance, m, config);
          if (r.objective != expected) {
            problem = method_name(m) + " returned " + std::to_string(r.objective) + ", oracle " +
                      std::to_string(expected);
          }
        } catch (const std::exception& e) {
          problem = method_name(m) + " threw: " + e.what();
        }
        if (problem.empty()) continue;
        ++summary.failures;
        std::ostringstream what;
        what << class_name(id) << " pair (" << a << ", " << b << ") at " << resolution / factor << "x"
             << resolution / factor << ": " << problem;
        summary.messages.push_back(what.str());
        if (!config.reproducer_dir.empty()) {
          dump_reproducer(config.reproducer_dir / ("verify_class" + std::to_string(id) + "_pair" +
                                                   std::to_string(a) + "_" + std::to_string(b)),
                          instance, what.str());
        }
      }
    }
  }
  return summary;
}

}  // namespace dotmark
