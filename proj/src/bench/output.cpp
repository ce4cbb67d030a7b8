#include "camr/bench/output.hpp"

#include <charconv>

namespace camr {

std::string format_number(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw InternalError("number formatting failed");
  return std::string(buf, p);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : out_(path), columns_(columns.size()) {
  if (!out_) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ >= columns_) throw InternalError("CSV row has too many fields");
  if (filled_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double x) {
  separator();
  out_ << format_number(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  separator();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw InternalError("CSV row has too few fields");
  out_ << '\n';
  filled_ = 0;
}

void write_report_csv(const std::filesystem::path& path, std::span<const AmrIteration> report) {
  CsvWriter csv(path, {"n[-]", "elements[-]", "dofs[-]", "gamma[-]", "eta[-]", "marked[-]", "contact_sweeps[-]",
                       "pcg_iterations[-]", "active_pairs[-]", "k_n[N/m]", "interpenetration[m]", "xi[sqrt(J)]",
                       "omega[sqrt(J)]", "max_level[-]", "stop[-]", "anti_cycling[-]", "contact_ranks[-]",
                       "imbalance[-]", "colocation_violations[-]", "separation_violations[-]"});
  for (const auto& r : report) {
    csv << r.n << r.elements << r.dofs << r.gamma << r.eta << r.marked << r.contact_sweeps << r.pcg_iterations
        << r.active << r.k_n << r.interpenetration << r.xi_global << r.omega_global << r.max_level
        << to_string(r.stop) << (r.anti_cycling ? 1 : 0) << r.contact_ranks << r.imbalance
        << r.colocation_violations << r.separation_violations;
    csv.end_row();
  }
}

void write_pressure_csv(const std::filesystem::path& path, std::span<const PressureSample> profile) {
  CsvWriter csv(path, {"s[m]", "r[m]", "pressure[Pa]", "active[-]", "pair[-]"});
  for (const auto& p : profile) {
    csv << p.s << p.r << p.p << (p.active ? 1 : 0) << p.pair;
    csv.end_row();
  }
}

void write_partition_csv(const std::filesystem::path& path, const PartitionPlan& plan, const Mesh& mesh,
                         const ContactPairing& pairing) {
  const auto rank = plan.rank_table(mesh.num_elements());
  CsvWriter csv(path, {"element[-]", "rank[-]", "contact[-]"});
  for (int e : mesh.leaves()) {
    csv << e << rank[static_cast<std::size_t>(e)] << (pairing.partner(e) >= 0 ? 1 : 0);
    csv.end_row();
  }
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const FeSpace& space,
               std::span<const double> u_full, std::span<const Voigt> nodal_stress, const VtkCellData& cells) {
  if (u_full.size() != space.num_dofs()) throw ConfigError("displacement size does not match the space");
  if (!nodal_stress.empty() && nodal_stress.size() != space.num_nodes())
    throw ConfigError("stress size does not match the space");
  const std::size_t ne = space.num_elements();
  if ((!cells.rank.empty() && cells.rank.size() != ne) || (!cells.error.empty() && cells.error.size() != ne))
    throw ConfigError("cell data size does not match the leaves");

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# vtk DataFile Version 3.0\ncontact-amr\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  const std::size_t nn = space.num_nodes();
  out << "POINTS " << nn << " double\n";
  for (std::size_t n = 0; n < nn; ++n) {
    const Vec2 p = space.node_position(static_cast<int>(n));
    out << format_number(p.x) << ' ' << format_number(p.y) << " 0\n";
  }
  out << "CELLS " << ne << ' ' << 5 * ne << '\n';
  for (std::size_t i = 0; i < ne; ++i) {
    const int* nodes = space.element_nodes(i);
    out << "4 " << nodes[0] << ' ' << nodes[1] << ' ' << nodes[2] << ' ' << nodes[3] << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (std::size_t i = 0; i < ne; ++i) out << "9\n";

  out << "POINT_DATA " << nn << "\nVECTORS displacement double\n";
  for (std::size_t n = 0; n < nn; ++n)
    out << format_number(u_full[2 * n]) << ' ' << format_number(u_full[2 * n + 1]) << " 0\n";
  if (!nodal_stress.empty()) {
    // Plane strain: sigma_zz is not carried by the 2D fields, written as 0.
    out << "TENSORS stress double\n";
    for (const auto& s : nodal_stress)
      out << format_number(s[0]) << ' ' << format_number(s[2]) << " 0\n"
          << format_number(s[2]) << ' ' << format_number(s[1]) << " 0\n0 0 0\n";
  }

  out << "CELL_DATA " << ne << "\nSCALARS level int 1\nLOOKUP_TABLE default\n";
  for (int e : space.leaves()) out << mesh.element(e).level << '\n';
  out << "SCALARS solid int 1\nLOOKUP_TABLE default\n";
  for (int e : space.leaves()) out << mesh.element(e).solid << '\n';
  if (!cells.rank.empty()) {
    out << "SCALARS rank int 1\nLOOKUP_TABLE default\n";
    for (int r : cells.rank) out << r << '\n';
  }
  if (!cells.error.empty()) {
    out << "SCALARS error double 1\nLOOKUP_TABLE default\n";
    for (double x : cells.error) out << format_number(x) << '\n';
  }
}

}  // namespace camr
