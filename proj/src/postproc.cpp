#include "hpcrack/postproc.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace hpcrack {

namespace {

StressStrain average_of(const StressStrain& a, const StressStrain& b)
{
  return {0.5 * (a.T13 + b.T13), 0.5 * (a.T23 + b.T23), 0.5 * (a.eps13 + b.eps13), 0.5 * (a.eps23 + b.eps23),
          0.5 * (a.energy_density + b.energy_density)};
}

std::ofstream open_for_write(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
  out.flush();
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

void append_fields(std::ostream& os, const StressStrain& s)
{
  os << ',' << format_double(s.T13) << ',' << format_double(s.T23) << ',' << format_double(s.eps13) << ','
     << format_double(s.eps23) << ',' << format_double(s.energy_density);
}

/// Calls f(cell, reference point, weight) at the n x n Gauss points of every active cell.
template <typename F>
void for_each_quadrature_point(const HpSpace& space, int extra_points, F&& f)
{
  for (CellId id : space.mesh().active()) {
    const auto& rule = gauss_1d(space.degree(id) + extra_points);
    for (std::size_t j = 0; j < rule.points.size(); ++j)
      for (std::size_t i = 0; i < rule.points.size(); ++i)
        f(id, std::array<double, 2>{rule.points[i], rule.points[j]}, rule.weights[i] * rule.weights[j]);
  }
}

}  // namespace

std::string format_double(double v)
{
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

std::vector<LineSample> sample_line(const HpSpace& space, const ModelParams& params, const SolutionField& phi,
                                    double x0, double x1, int n_points, double delta)
{
  if (n_points < 2)
    throw std::invalid_argument("sample_line needs at least two points");
  std::vector<LineSample> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    LineSample s;
    s.x = x0 + (x1 - x0) * k / (n_points - 1);
    s.below = stress_strain(space.evaluate_at(phi, s.x, 0.5 - delta).gradient, params);
    s.above = stress_strain(space.evaluate_at(phi, s.x, 0.5 + delta).gradient, params);
    s.average = average_of(s.below, s.above);
    out.push_back(s);
  }
  return out;
}

ErrorNorms error_norms(const HpSpace& space, const SolutionField& phi, const ExactSolution& exact)
{
  double l2 = 0.0;
  double h1 = 0.0;
  for_each_quadrature_point(space, 3, [&](CellId id, std::array<double, 2> ref, double w) {
    const double h = space.mesh().h(id);
    const auto x = space.map_to_physical(id, ref);
    const PointValue v = space.evaluate(phi, id, ref);
    const double e = v.value - exact.value(x[0], x[1]);
    const Eigen::Vector2d ge = v.gradient - exact.gradient(x[0], x[1]);
    l2 += w * h * h * e * e;
    h1 += w * h * h * ge.squaredNorm();
  });
  return {std::sqrt(l2), std::sqrt(h1)};
}

double max_strain_norm(const HpSpace& space, const ModelParams& params, const SolutionField& phi)
{
  double m = 0.0;
  for_each_quadrature_point(space, 2, [&](CellId id, std::array<double, 2> ref, double) {
    const StressStrain s = stress_strain(space.evaluate(phi, id, ref).gradient, params);
    m = std::max(m, std::hypot(s.eps13, s.eps23));
  });
  return m;
}

double min_energy_density(const HpSpace& space, const ModelParams& params, const SolutionField& phi)
{
  double m = std::numeric_limits<double>::infinity();
  for_each_quadrature_point(space, 2, [&](CellId id, std::array<double, 2> ref, double) {
    m = std::min(m, stress_strain(space.evaluate(phi, id, ref).gradient, params).energy_density);
  });
  return m;
}

FieldSnapshot make_snapshot(const HpSpace& space, const SolutionField& phi, const ErrorIndicators* eta)
{
  const auto& mesh = space.mesh();
  FieldSnapshot snap;
  std::map<std::array<std::int64_t, 2>, std::size_t> index;
  for (CellId id : mesh.active()) {
    const auto lo = mesh.lattice_origin(id);
    const std::int64_t len = mesh.lattice_size(id);
    const std::array<std::array<int, 2>, 4> corners = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    std::array<std::size_t, 4> conn{};
    for (std::size_t c = 0; c < 4; ++c) {
      const std::array<std::int64_t, 2> key = {lo[0] + corners[c][0] * len, lo[1] + corners[c][1] * len};
      auto it = index.find(key);
      if (it == index.end()) {
        const std::array<double, 2> ref = {static_cast<double>(corners[c][0]), static_cast<double>(corners[c][1])};
        it = index.emplace(key, snap.points.size()).first;
        snap.points.push_back(space.map_to_physical(id, ref));
        snap.phi.push_back(space.evaluate(phi, id, ref).value);
      }
      conn[c] = it->second;
    }
    snap.cells.push_back(conn);
    snap.degree.push_back(space.degree(id));
    snap.level.push_back(mesh.cell(id).level);
    snap.eta.push_back(eta ? (*eta)[id] : 0.0);
  }
  return snap;
}

void write_csv(const std::vector<LineSample>& samples, const std::filesystem::path& path)
{
  auto out = open_for_write(path);
  out << "x,T13,T23,eps13,eps23,W";
  for (const char* side : {"side_lo", "side_hi"})
    for (const char* name : {"T13", "T23", "eps13", "eps23", "W"})
      out << ',' << side << '_' << name;
  out << '\n';
  for (const LineSample& s : samples) {
    out << format_double(s.x);
    append_fields(out, s.average);
    append_fields(out, s.below);
    append_fields(out, s.above);
    out << '\n';
  }
  finish(out, path);
}

void write_vtu(const FieldSnapshot& snap, const std::filesystem::path& path)
{
  auto out = open_for_write(path);
  out << "<?xml version=\"1.0\"?>\n"
      << "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n"
      << "  <UnstructuredGrid>\n"
      << "    <Piece NumberOfPoints=\"" << snap.points.size() << "\" NumberOfCells=\"" << snap.cells.size()
      << "\">\n";
  out << "      <PointData Scalars=\"phi\">\n"
      << "        <DataArray type=\"Float64\" Name=\"phi\" format=\"ascii\">\n";
  for (double v : snap.phi)
    out << "          " << format_double(v) << '\n';
  out << "        </DataArray>\n      </PointData>\n";
  out << "      <CellData Scalars=\"degree\">\n"
      << "        <DataArray type=\"Int32\" Name=\"degree\" format=\"ascii\">\n";
  for (int v : snap.degree)
    out << "          " << v << '\n';
  out << "        </DataArray>\n"
      << "        <DataArray type=\"Int32\" Name=\"level\" format=\"ascii\">\n";
  for (int v : snap.level)
    out << "          " << v << '\n';
  out << "        </DataArray>\n"
      << "        <DataArray type=\"Float64\" Name=\"eta\" format=\"ascii\">\n";
  for (double v : snap.eta)
    out << "          " << format_double(v) << '\n';
  out << "        </DataArray>\n      </CellData>\n";
  out << "      <Points>\n        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (const auto& p : snap.points)
    out << "          " << format_double(p[0]) << ' ' << format_double(p[1]) << " 0\n";
  out << "        </DataArray>\n      </Points>\n";
  out << "      <Cells>\n        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
  for (const auto& c : snap.cells)
    out << "          " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  out << "        </DataArray>\n        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
  for (std::size_t k = 0; k < snap.cells.size(); ++k)
    out << "          " << 4 * (k + 1) << '\n';
  out << "        </DataArray>\n        <DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
  for (std::size_t k = 0; k < snap.cells.size(); ++k)
    out << "          9\n";  // VTK_QUAD
  out << "        </DataArray>\n      </Cells>\n    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n";
  finish(out, path);
}

void write_log(const std::vector<CycleRecord>& records, const std::filesystem::path& path)
{
  nlohmann::ordered_json log = nlohmann::ordered_json::array();
  for (const CycleRecord& r : records) {
    nlohmann::ordered_json entry;
    entry["cycle"] = r.cycle;
    entry["n_cells"] = r.n_cells;
    entry["n_dofs"] = r.n_dofs;
    entry["eta_total"] = r.eta_total;
    entry["newton"] = r.newton_residuals;
    entry["newton_converged"] = r.newton_converged;
    entry["plan"] = {{"n_h", r.n_h}, {"n_p", r.n_p}};
    log.push_back(std::move(entry));
  }
  auto out = open_for_write(path);
  out << log.dump(2) << '\n';
  finish(out, path);
}

}  // namespace hpcrack
