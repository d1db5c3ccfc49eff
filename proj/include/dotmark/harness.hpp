#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dotmark/benchgen.hpp"
#include "dotmark/measures.hpp"
#include "dotmark/semidiscrete.hpp"
#include "dotmark/shortlist.hpp"

namespace dotmark {

enum class Method { Tps, Shortlist, Shielding, Aha };

std::string method_name(Method method);
/// Accepts "tps", "shortlist", "shielding" and "aha". Throws InvalidArgument otherwise.
Method method_from_name(std::string_view name);
inline bool is_exact(Method method) noexcept { return method != Method::Aha; }

enum class Verification { ExactMatch, CertifiedOptimal, AhaApprox, Failed };

std::string verification_name(Verification status);
Verification verification_from_name(std::string_view name);

/// One solve of one pair by one method.
struct RunRecord {
  int class_id = 0;
  int resolution = 0;
  int image_a = 0;  // 1-based member indices, image_a < image_b
  int image_b = 0;
  std::string method;
  double seconds = 0.0;  // wall clock of the solve call only
  /// Exact methods: optimal objective in squared pixel units.
  std::int64_t objective = 0;
  /// AHA: transport cost of the returned pixel plan on the unit square.
  double real_objective = 0.0;
  double w2 = 0.0;  // on the unit square
  /// Shielding: restricted solves. AHA: L-BFGS iterations. Otherwise equal to pivots.
  std::int64_t iterations = 0;
  std::int64_t pivots = 0;
  std::optional<double> pe;
  std::optional<double> rwe;
  Verification status = Verification::CertifiedOptimal;
  nlohmann::json extra = nlohmann::json::object();  // unknown fields, kept on round trips

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Mean over the records of one (class, method); class_id 0 is the overall row.
struct MethodAverage {
  int class_id = 0;
  std::string method;
  int count = 0;
  double seconds = 0.0;
  double iterations = 0.0;
  double pivots = 0.0;
  std::optional<double> pe;
  std::optional<double> rwe;

  friend bool operator==(const MethodAverage&, const MethodAverage&) = default;
};

inline constexpr int kReportSchemaVersion = 1;

struct Report {
  int schema_version = kReportSchemaVersion;
  int resolution = 0;
  std::vector<std::string> methods;
  std::string timing_note;
  std::vector<MethodAverage> averages;
  std::vector<RunRecord> records;
  nlohmann::json extra = nlohmann::json::object();

  bool failed() const;
  friend bool operator==(const Report&, const Report&) = default;
};

/// Per class and method, then overall per method, each summed in record order.
std::vector<MethodAverage> compute_averages(const std::vector<RunRecord>& records,
                                            const std::vector<std::string>& methods);

nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Report& report);
/// Throws InvalidArgument on a newer schema version or missing fields.
Report report_from_json(const nlohmann::json& j);

// ---- corpus files ----

/// "data<n>_100<k>.csv" for member k = 1..10 (so data32_1001.csv ... data32_1010.csv).
std::string corpus_file_name(int resolution, int member);
std::filesystem::path class_directory(const std::filesystem::path& corpus, int class_id);

/// Writes the ten members and records the spec in <corpus>/manifest.json. Throws IoError.
void write_class(const std::filesystem::path& corpus, const ClassSpec& spec,
                 const std::vector<GridMeasure>& members);
/// Generates with build_class and writes.
std::vector<GridMeasure> generate_class(const std::filesystem::path& corpus, const ClassSpec& spec);
/// Loads the ten members of a class at a resolution. Throws IoError if any file is missing.
std::vector<GridMeasure> load_class(const std::filesystem::path& corpus, int class_id, int resolution);
/// Classes that have all ten files at the resolution, ascending.
std::vector<int> available_classes(const std::filesystem::path& corpus, int resolution);

// ---- benchmark ----

struct BenchConfig {
  int resolution = 32;
  std::vector<Method> methods{Method::Tps, Method::Shortlist, Method::Shielding};
  /// 1-based pairs (a, b), a < b; empty means all 45.
  std::vector<std::pair<int, int>> pairs;
  int workers = 1;
  /// More workers than hardware threads skews timings; refused unless set.
  bool allow_oversubscribe = false;
  ShortlistParams shortlist;
  AhaConfig aha;
  /// Where to dump a reproducer on disagreement; nothing is written when empty.
  std::filesystem::path reproducer_dir;
  std::function<void(const RunRecord&)> on_record;
};

/// All ordered pairs a < b of the ten class members.
std::vector<std::pair<int, int>> all_pairs();

/**
 * @brief Solves every selected pair of every class with every method.
 *
 * Each worker runs one solve at a time. The transport problem is built
 * before the clock starts, so the recorded time covers the solve call only.
 * Exact objectives are compared per pair; a mismatch marks those records
 * FAILED and dumps a reproducer. AHA needs an exact W2 for its RWE: it takes
 * it from an exact method of the same run, or else solves by shielding
 * outside the timed region.
 */
Report run_benchmark(const std::map<int, std::vector<GridMeasure>>& classes, const BenchConfig& config);
Report run_benchmark(const std::filesystem::path& corpus, const std::vector<int>& class_ids,
                     const BenchConfig& config);

/// The solvers of one pair, for the CLI and the benchmark.
RunRecord solve_pair(const Instance& instance, Method method, const BenchConfig& config);

/// Writes report.json, runtimes.md, aha_errors.md and instances.csv into dir. Throws IoError.
void emit_report(const Report& report, const std::filesystem::path& dir);
std::string format_runtime_table(const Report& report);
std::string format_error_table(const Report& report);
std::string format_instance_csv(const Report& report);

/// Sum of factor x factor blocks. Throws InvalidArgument unless factor divides the resolution.
GridMeasure coarsen(const GridMeasure& measure, int factor);

/**
 * @brief Shrinks a failing instance while it keeps failing.
 *
 * Tries repeated 2 x 2 coarsening, then quadrant crops rebalanced to equal
 * totals, and keeps any candidate for which still_fails holds.
 */
Instance minimize_instance(const Instance& instance, const std::function<bool(const Instance&)>& still_fails);

/// Writes a.csv, b.csv and README.txt describing the disagreement.
void dump_reproducer(const std::filesystem::path& dir, const Instance& instance, const std::string& description);

/// True iff every exact method returns the same objective.
bool exact_methods_agree(const Instance& instance);

struct VerifySummary {
  int instances = 0;
  int failures = 0;
  std::vector<std::string> messages;
};

/**
 * @brief Oracle sweep over a corpus.
 *
 * Every class found is coarsened to at most 8 x 8 and each of its 45 pairs
 * is solved by all exact methods and by the min-cost-flow oracle.
 */
VerifySummary verify_corpus(const std::filesystem::path& corpus, int resolution, const BenchConfig& config = {});

}  // namespace dotmark
