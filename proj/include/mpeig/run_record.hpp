#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpeig/analysis.hpp"
#include "mpeig/solver_types.hpp"

namespace mpeig {

// One executed (matrix, variant) pair, flattened for reporting. CSV emits one
// row per eigenpair with the run-level fields repeated; numeric formatting is
// shortest-round-trip so identical runs produce identical files.
struct RunRecord {
  std::string matrix_name;
  std::size_t n = 0;
  std::int64_t nnz = 0;
  std::string variant;
  std::size_t k = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::size_t iters_lower = 0;
  std::size_t iters_working = 0;
  bool converged = false;
  std::vector<double> theta;
  std::vector<double> resid;
  StageTimings timings;
  std::optional<analysis::BoundReport> bounds;
  std::vector<IterationRecord> history;
};

std::string format_shortest(double v);

std::string run_record_csv(const std::vector<RunRecord>& records);
void write_csv(const std::string& path, const std::vector<RunRecord>& records);

std::string history_json(const std::vector<RunRecord>& records);
void write_history_json(const std::string& path,
                        const std::vector<RunRecord>& records);

}  // namespace mpeig
