#include "cdtopo/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "cdtopo/error.hpp"

namespace cdtopo {

namespace {

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_density_image(const DensityField& rho, const Mesh& mesh, const std::string& path) {
  if (rho.size() != mesh.num_elements()) throw InvalidArgument("density field does not match the mesh");
  std::ofstream out = open_for_writing(path);
  out << "P2\n" << mesh.nx() << ' ' << mesh.ny() << "\n255\n";
  for (int row = 0; row < mesh.ny(); ++row) {
    for (int col = 0; col < mesh.nx(); ++col) {
      const double r = std::clamp(rho.rho[mesh.element_index(col, row)], 0.0, 1.0);
      if (col > 0) out << ' ';
      out << static_cast<int>(std::lround(255.0 * (1.0 - r)));
    }
    out << '\n';
  }
  finish(out, path);
}

void write_history_csv(const RunResult& result, const std::string& path) {
  if (result.history.empty()) throw InvalidArgument("run result has no history");
  std::ofstream out = open_for_writing(path);
  out << "iter,compliance,volume,grayness\n";
  for (const auto& rec : result.history) {
    out << rec.iter << ',' << format_double(rec.compliance) << ',' << format_double(rec.volume)
        << ',' << format_double(rec.grayness) << '\n';
  }
  finish(out, path);
}

void write_density_csv(const DensityField& rho, const Mesh& mesh, const std::string& path) {
  if (rho.size() != mesh.num_elements()) throw InvalidArgument("density field does not match the mesh");
  std::ofstream out = open_for_writing(path);
  out << "element,col,row,rho\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto [col, row] = mesh.element_position(e);
    out << e << ',' << col << ',' << row << ',' << format_double(rho.rho[e]) << '\n';
  }
  finish(out, path);
}

}  // namespace cdtopo
