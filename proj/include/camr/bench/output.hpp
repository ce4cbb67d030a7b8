#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "camr/amr/loop.hpp"

namespace camr {

/// Comma-separated table with a single header row. Columns carry their unit
/// in brackets, e.g. "k_n[N/m]"; "[-]" marks dimensionless values.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(std::size_t x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(const std::string& s);
  /// Ends the current row; throws InternalError if it has the wrong width.
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

/// Shortest round-trip decimal form.
std::string format_number(double x);

void write_report_csv(const std::filesystem::path& path, std::span<const AmrIteration> report);
void write_pressure_csv(const std::filesystem::path& path, std::span<const PressureSample> profile);
/// One row per leaf: element id, rank, whether it lies on a contact boundary.
void write_partition_csv(const std::filesystem::path& path, const PartitionPlan& plan, const Mesh& mesh,
                         const ContactPairing& pairing);

/// Optional per-leaf fields of the VTK dump, indexed like space.leaves().
struct VtkCellData {
  std::vector<int> rank;
  std::vector<double> error;
};

/// Legacy ASCII unstructured grid of the leaves as linear quads with
/// displacement (and recovered stress when given) as point data, and level,
/// solid, rank and error estimate as cell data.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const FeSpace& space,
               std::span<const double> u_full, std::span<const Voigt> nodal_stress = {},
               const VtkCellData& cells = {});

}  // namespace camr
