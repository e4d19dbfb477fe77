#include "insulopt/io.hpp"

#include <charconv>
#include <fstream>

#include "insulopt/errors.hpp"

namespace insulopt {

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;   // normalize -0
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);   // binary: no newline translation
    if (!out) throw Error("cannot open output file '" + path + "'");
    return out;
}

void write_line(std::ofstream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out = open_out(path);
    write_line(out, header);
    for (const auto& row : rows) write_line(out, row);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<std::string>> rendered;
    rendered.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double v : row) cells.push_back(format_number(v));
        rendered.push_back(std::move(cells));
    }
    write_csv(path, header, rendered);
}

void write_solution_csv(const std::string& path, const TriangleMesh& mesh,
                        const std::vector<double>& u) {
    std::vector<std::vector<double>> rows;
    rows.reserve(mesh.nodes.size());
    for (int i = 0; i < mesh.num_nodes(); ++i)
        rows.push_back({mesh.nodes[i].x, mesh.nodes[i].y, u[i]});
    write_csv(path, {"x", "y", "u"}, rows);
}

void write_distribution_csv(const std::string& path, const InsulationLayout& layout,
                            double beta) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const BoundaryChain& ch = layout.chains[c];
        for (int i = 0; i < ch.num_nodes(); ++i) {
            const double dt = layout.dist.dtilde[c][i];
            rows.push_back({std::to_string(c), format_number(ch.arclen[i]),
                            format_number(ch.nodes[i].x), format_number(ch.nodes[i].y),
                            format_number(layout.dist.d[c][i]), format_number(dt),
                            format_number(beta / (1.0 + beta * dt))});
        }
    }
    write_csv(path, {"chain", "s", "x", "y", "d", "dtilde", "w"}, rows);
}

void write_vtk(const std::string& path, const TriangleMesh& mesh, const std::vector<double>& u,
               const std::string& field_name) {
    std::ofstream out = open_out(path);
    out << "# vtk DataFile Version 3.0\n";
    out << "insulopt field\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_nodes() << " double\n";
    for (const Vec2& p : mesh.nodes)
        out << format_number(p.x) << ' ' << format_number(p.y) << " 0\n";
    out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles)
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << mesh.num_triangles() << '\n';
    for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
    out << "CELL_DATA " << mesh.num_triangles() << '\n';
    out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
    for (Region r : mesh.region) out << (r == Region::Body ? 0 : 1) << '\n';
    if (!u.empty()) {
        out << "POINT_DATA " << mesh.num_nodes() << '\n';
        out << "SCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : u) out << format_number(v) << '\n';
    }
}

}  // namespace insulopt
