#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "circle/normalform.hpp"

namespace circle {

enum class Pipeline { GateOnly, Full };

/// A (eps, eta, nu) grid. eps outermost, nu innermost; each range is
/// lo + (hi - lo) i / (steps - 1), and steps = 1 is only allowed for lo = hi.
struct SweepSpec {
  std::vector<double> eps_list;
  double eta_lo = 0.0, eta_hi = 0.0;
  int eta_steps = 2;
  double nu_lo = 0.0, nu_hi = 0.0;
  int nu_steps = 2;
  DiophantineNumber alpha;
  Perturbation pert;
  Pipeline pipeline = Pipeline::GateOnly;
  unsigned seed = 0;  // recorded with the results; the pipeline itself is deterministic
  double c = kDefaultGateCap;
  double c2 = 0.0;
  bool trace_c_alpha = true;
  nlohmann::json source;  // what the hash is taken over

  int cell_count() const;
  double eta_at(int i) const;
  double nu_at(int j) const;
  /// Parameters of cell `index` in sweep order.
  Params cell_params(int index) const;
};

/// Throws ParseError, IoError, PreconditionFailed (empty ranges, bad steps).
SweepSpec parse_sweep_spec(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string spec_hash(const SweepSpec& spec);

struct CAlphaPoint {
  double eps = 0.0;
  double eta = 0.0;
  std::optional<double> nu_star;
  std::optional<double> lambda;
  std::string error;
};

struct SweepOptions {
  std::filesystem::path out;  // empty: keep results in memory only
  bool resume = false;
  int threads = 0;            // 0: CIRCLE_LAB_THREADS, else hardware concurrency
  long max_cells = -1;        // stop after this many newly computed cells (simulated interrupt)
};

struct SweepResult {
  std::vector<RegionReport> reports;  // in cell order, including resumed ones
  std::vector<CAlphaPoint> c_alpha;
  int resumed = 0;
  int computed = 0;
  int fatal_errors = 0;
  bool complete = false;
};

/// Classifies every cell (in parallel batches, appended in cell order by a
/// single writer) and traces C_alpha by continuation in eta for each eps.
SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opt = {});

/// CIRCLE_LAB_THREADS if set and positive, else hardware concurrency.
int lab_threads();

std::filesystem::path sidecar_path(const std::filesystem::path& out);
std::filesystem::path c_alpha_path(const std::filesystem::path& out);

/// Outer edge of the below-gate region (eta >= c2 eps and
/// eta >= sqrt(2 pi)|nu - alpha|) on each eta row of one eps slice.
struct ConeRow {
  double eta = 0.0;
  std::optional<double> nu_left, nu_right;
};
std::vector<ConeRow> cone_boundary(const std::vector<RegionReport>& reports, double eps);

enum class FigureFormat { Csv, Svg };

void write_reports_csv(std::ostream& out, const std::vector<RegionReport>& reports,
                       const std::optional<std::vector<RegionTag>>& tags = std::nullopt);
void write_c_alpha_csv(std::ostream& out, const std::vector<CAlphaPoint>& points);
void write_svg(std::ostream& out, const std::vector<RegionReport>& reports, const std::vector<CAlphaPoint>& c_alpha,
               double alpha);

/// Throws PreconditionFailed on empty reports and IoError on write failure.
void emit_figures(const std::vector<RegionReport>& reports, const std::vector<CAlphaPoint>& c_alpha,
                  FigureFormat format, const std::filesystem::path& path, double alpha,
                  const std::optional<std::vector<RegionTag>>& tags = std::nullopt);

std::optional<RegionTag> parse_region_tag(std::string_view text);

}  // namespace circle
