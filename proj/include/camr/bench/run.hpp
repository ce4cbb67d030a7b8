#pragma once

#include <ostream>

#include "camr/bench/config.hpp"

namespace camr {

/// Runs one mode and writes its artifacts under config.out_dir:
/// report.csv, summary.txt and, per iteration or level, pressure_<i>.csv,
/// mesh_<i>.vtk and partition_<i>.csv. Progress goes to `log`.
/// On SolverError a trace.txt is written before the error propagates.
void run_bench(const BenchConfig& config, std::ostream& log);

}  // namespace camr
