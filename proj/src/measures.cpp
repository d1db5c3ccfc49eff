#include "dotmark/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dotmark/errors.hpp"

namespace dotmark {

GridMeasure::GridMeasure(int resolution, std::vector<std::int64_t> masses)
    : resolution_(resolution), masses_(std::move(masses)) {
  if (resolution_ <= 0) throw InvalidArgument("GridMeasure: resolution must be positive");
  if (masses_.size() != static_cast<std::size_t>(resolution_) * resolution_) {
    throw InvalidArgument("GridMeasure: expected " + std::to_string(resolution_ * resolution_) +
                          " masses, got " + std::to_string(masses_.size()));
  }
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    if (masses_[k] < 0) throw InvalidArgument("GridMeasure: negative mass at pixel " + std::to_string(k));
    if (__builtin_add_overflow(total_, masses_[k], &total_)) throw InvalidArgument("GridMeasure: total mass overflows int64");
  }
  if (total_ == 0) throw InvalidArgument("GridMeasure: all masses are zero");
}

std::size_t GridMeasure::positive_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(masses_.begin(), masses_.end(), [](std::int64_t m) { return m > 0; }));
}

void TransportPlan::validate() const {
  const auto ns = static_cast<std::int64_t>(source_resolution) * source_resolution;
  const auto nt = static_cast<std::int64_t>(target_resolution) * target_resolution;
  std::vector<std::pair<std::int32_t, std::int32_t>> keys;
  keys.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.source < 0 || e.source >= ns || e.target < 0 || e.target >= nt) {
      throw InvalidArgument("TransportPlan: index out of range (" + std::to_string(e.source) + ", " +
                            std::to_string(e.target) + ")");
    }
    if (e.mass <= 0) {
      throw InvalidArgument("TransportPlan: non-positive mass on (" + std::to_string(e.source) + ", " +
                            std::to_string(e.target) + ")");
    }
    keys.emplace_back(e.source, e.target);
  }
  std::sort(keys.begin(), keys.end());
  if (auto it = std::adjacent_find(keys.begin(), keys.end()); it != keys.end()) {
    throw InvalidArgument("TransportPlan: duplicate pair (" + std::to_string(it->first) + ", " +
                          std::to_string(it->second) + ")");
  }
}

void TransportPlan::canonicalize() {
  std::sort(entries.begin(), entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
}

Instance::Instance(GridMeasure source, GridMeasure target, CostSpec cost)
    : source_(std::move(source)), target_(std::move(target)), cost_(cost) {
  if (source_.resolution() != target_.resolution()) {
    throw InvalidArgument("Instance: source and target resolutions differ");
  }
  if (source_.total() != target_.total()) {
    throw InvalidArgument("Instance: unbalanced (source total " + std::to_string(source_.total()) +
                          ", target total " + std::to_string(target_.total()) + ")");
  }
  if (!(cost_.exponent >= 1.0) || !std::isfinite(cost_.exponent)) {
    throw InvalidArgument("Instance: cost exponent must be >= 1");
  }
}

double cost(std::int64_t i, std::int64_t j, const CostSpec& spec, int n) {
  const std::int64_t size = static_cast<std::int64_t>(n) * n;
  if (n <= 0 || i < 0 || j < 0 || i >= size || j >= size) {
    throw InvalidArgument("cost: pixel index out of range");
  }
  const double scale = spec.convention == CoordinateConvention::UnitSquare ? 1.0 / n : 1.0;
  // The half-pixel offset cancels in differences.
  const double dr = static_cast<double>(i / n - j / n) * scale;
  const double dc = static_cast<double>(i % n - j % n) * scale;
  const double sq = dr * dr + dc * dc;
  if (spec.exponent == 2.0) return sq;
  return std::pow(std::sqrt(sq), spec.exponent);
}

std::int64_t plan_cost_integer(const TransportPlan& plan) {
  plan.validate();
  if (plan.source_resolution != plan.target_resolution) {
    throw InvalidArgument("plan_cost_integer: grids differ");
  }
  const int n = plan.source_resolution;
  __int128 sum = 0;
  for (const auto& e : plan.entries) sum += static_cast<__int128>(squared_pixel_distance(e.source, e.target, n)) * e.mass;
  if (sum > std::numeric_limits<std::int64_t>::max()) throw NumericalError("plan_cost_integer: objective overflows int64");
  return static_cast<std::int64_t>(sum);
}

double plan_cost(const TransportPlan& plan, const CostSpec& spec) {
  if (plan.entries.empty()) return 0.0;
  if (plan.source_resolution != plan.target_resolution) {
    throw InvalidArgument("plan_cost: grids differ");
  }
  const int n = plan.source_resolution;
  if (spec.exponent == 2.0) {
    plan.validate();
    __int128 sum = 0;
    for (const auto& e : plan.entries) sum += static_cast<__int128>(squared_pixel_distance(e.source, e.target, n)) * e.mass;
    const double value = static_cast<double>(sum);
    return spec.convention == CoordinateConvention::UnitSquare ? value / (static_cast<double>(n) * n) : value;
  }
  plan.validate();
  // Kahan summation keeps p != 2 sums stable.
  double sum = 0.0, comp = 0.0;
  for (const auto& e : plan.entries) {
    const double term = cost(e.source, e.target, spec, n) * static_cast<double>(e.mass) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

double wasserstein(double optimal_cost, std::int64_t total_mass, const CostSpec& spec) {
  if (total_mass <= 0) throw InvalidArgument("wasserstein: total mass must be positive");
  if (optimal_cost < 0.0) throw InvalidArgument("wasserstein: negative cost");
  const double normalized = optimal_cost / static_cast<double>(total_mass);
  if (spec.exponent == 2.0) return std::sqrt(normalized);
  if (spec.exponent == 1.0) return normalized;
  return std::pow(normalized, 1.0 / spec.exponent);
}

double unit_square_w2(std::int64_t integer_objective, std::int64_t total_mass, int resolution) {
  return wasserstein(static_cast<double>(integer_objective), total_mass,
                     CostSpec{2.0, CoordinateConvention::PixelInteger}) /
         resolution;
}

FeasibilityReport check_feasible(const TransportPlan& plan, const Instance& instance) {
  FeasibilityReport report;
  try {
    plan.validate();
  } catch (const InvalidArgument& e) {
    report.feasible = false;
    report.structurally_valid = false;
    report.structural_error = e.what();
    return report;
  }
  const int n = instance.resolution();
  if (plan.source_resolution != n || plan.target_resolution != n) {
    report.feasible = false;
    report.structurally_valid = false;
    report.structural_error = "plan resolution does not match instance";
    return report;
  }
  const std::size_t size = static_cast<std::size_t>(n) * n;
  std::vector<std::int64_t> rows(size, 0), cols(size, 0);
  for (const auto& e : plan.entries) {
    rows[e.source] += e.mass;
    cols[e.target] += e.mass;
  }
  for (std::size_t k = 0; k < size; ++k) {
    if (rows[k] != instance.source()[k]) {
      report.violations.push_back({MarginalViolation::Side::Row, static_cast<std::int32_t>(k), instance.source()[k], rows[k]});
    }
  }
  for (std::size_t k = 0; k < size; ++k) {
    if (cols[k] != instance.target()[k]) {
      report.violations.push_back({MarginalViolation::Side::Column, static_cast<std::int32_t>(k), instance.target()[k], cols[k]});
    }
  }
  report.feasible = report.violations.empty();
  return report;
}

namespace {

std::string location(int row, int col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

}  // namespace

GridMeasure parse_grid_csv(const std::string& text) {
  std::vector<std::vector<std::int64_t>> rows;
  std::istringstream in(text);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row;
    if (line.find_first_not_of(" \t") == std::string::npos) {
      // Blank lines are tolerated only at the end of the file.
      std::string rest;
      while (std::getline(in, rest)) {
        if (rest.find_first_not_of(" \t\r") != std::string::npos) {
          throw ParseError(ParseError::Kind::RaggedRow, row, 1, "grid csv: empty line at " + location(row, 1));
        }
      }
      break;
    }
    std::vector<std::int64_t> values;
    std::size_t start = 0;
    int col = 0;
    while (true) {
      ++col;
      const std::size_t comma = line.find(',', start);
      std::string token = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const auto first = token.find_first_not_of(" \t");
      const auto last = token.find_last_not_of(" \t");
      token = first == std::string::npos ? std::string{} : token.substr(first, last - first + 1);
      if (!token.empty() && token[0] == '-') {
        throw ParseError(ParseError::Kind::NegativeValue, row, col, "grid csv: negative value '" + token + "' at " + location(row, col));
      }
      std::int64_t value = 0;
      const char* begin = token.data();
      const char* end = token.data() + token.size();
      if (!token.empty() && token[0] == '+') ++begin;
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (token.empty() || ec != std::errc{} || ptr != end) {
        // Accept integral decimals such as "3.0" or "1e5"; reject anything with a fraction.
        char* parse_end = nullptr;
        const double d = token.empty() ? 0.0 : std::strtod(token.c_str(), &parse_end);
        if (token.empty() || parse_end != token.c_str() + token.size() || !std::isfinite(d) || d != std::floor(d) ||
            d > 9.0e18) {
          throw ParseError(ParseError::Kind::NotAnInteger, row, col, "grid csv: non-integer token '" + token + "' at " + location(row, col));
        }
        if (d < 0) {
          throw ParseError(ParseError::Kind::NegativeValue, row, col, "grid csv: negative value '" + token + "' at " + location(row, col));
        }
        value = static_cast<std::int64_t>(d);
      }
      values.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ParseError(ParseError::Kind::RaggedRow, row, static_cast<int>(std::min(values.size(), rows.front().size())) + 1,
                       "grid csv: ragged row " + std::to_string(row) + " has " + std::to_string(values.size()) +
                           " values, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError(ParseError::Kind::EmptyFile, 0, 0, "grid csv: empty file");
  const std::size_t n = rows.size();
  if (rows.front().size() != n) {
    throw ParseError(ParseError::Kind::NonSquare, static_cast<int>(n), static_cast<int>(rows.front().size()),
                     "grid csv: grid is " + std::to_string(n) + " x " + std::to_string(rows.front().size()) + ", expected square");
  }
  std::vector<std::int64_t> masses;
  masses.reserve(n * n);
  for (const auto& r : rows) masses.insert(masses.end(), r.begin(), r.end());
  if (std::all_of(masses.begin(), masses.end(), [](std::int64_t m) { return m == 0; })) {
    throw ParseError(ParseError::Kind::AllZero, 1, 1, "grid csv: all masses are zero");
  }
  return GridMeasure(static_cast<int>(n), std::move(masses));
}

GridMeasure load_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return parse_grid_csv(buffer.str());
}

std::string format_grid_csv(const GridMeasure& measure) {
  std::string out;
  const int n = measure.resolution();
  out.reserve(static_cast<std::size_t>(n) * n * 7);
  char buf[24];
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c) out.push_back(',');
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, measure.at(r, c));
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

void save_grid_csv(const GridMeasure& measure, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_grid_csv(measure);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace dotmark
