#pragma once

#include <string>
#include <vector>

#include "insulopt/geometry.hpp"
#include "insulopt/meshing.hpp"

namespace insulopt {

// Deterministic text output: numbers are rendered with std::to_chars
// (shortest round-trip form, locale independent), so identical inputs give
// byte-identical files.

std::string format_number(double v);

// Rows of prerendered cells under a header line.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Convenience for purely numeric tables.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Nodal field: x, y, u.
void write_solution_csv(const std::string& path, const TriangleMesh& mesh,
                        const std::vector<double>& u);

// Distribution along the insulated chains: chain, s, x, y, d, dtilde, w
// with w = beta / (1 + beta dtilde).
void write_distribution_csv(const std::string& path, const InsulationLayout& layout,
                            double beta);

// Legacy ASCII VTK with the region id per cell and u per point.
void write_vtk(const std::string& path, const TriangleMesh& mesh, const std::vector<double>& u,
               const std::string& field_name = "u");

}  // namespace insulopt
