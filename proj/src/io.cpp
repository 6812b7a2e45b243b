#include "gct/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gct::io {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw InputError("matrix_from_json: expected a nested array");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) {
            throw InputError("matrix_from_json: ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw InputError("vector_from_json: expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

json point_to_json(const Point& p) {
    json j;
    j["manifold"] = to_string(p.manifold().kind);
    j["n"] = p.manifold().n;
    if (p.manifold().kind == ManifoldKind::SpdCone) {
        j["coords"] = matrix_to_json(p.mat().mat());
    } else {
        j["coords"] = vector_to_json(p.vec());
    }
    return j;
}

Point point_from_json(const json& j) {
    const ManifoldSpec m{manifold_kind_from_string(j.at("manifold").get<std::string>()),
                         j.at("n").get<int>()};
    if (m.kind == ManifoldKind::SpdCone) {
        return Point(m, SpdMatrix(matrix_from_json(j.at("coords"))));
    }
    return Point(m, vector_from_json(j.at("coords")));
}

json tangent_to_json(const Tangent& v) {
    json j;
    j["base"] = point_to_json(v.base());
    if (v.manifold().kind == ManifoldKind::SpdCone) {
        j["vec"] = matrix_to_json(v.mat().mat());
    } else {
        j["vec"] = vector_to_json(v.vec());
    }
    return j;
}

Tangent tangent_from_json(const json& j) {
    const Point base = point_from_json(j.at("base"));
    if (base.manifold().kind == ManifoldKind::SpdCone) {
        return Tangent(base, SymMatrix(matrix_from_json(j.at("vec"))));
    }
    return Tangent(base, vector_from_json(j.at("vec")));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("parse error in " + path + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << content;
}

SpdMatrix read_spd_file(const std::string& path) {
    const json j = read_json_file(path);
    const int n = j.at("n").get<int>();
    const Eigen::MatrixXd m = matrix_from_json(j.at("P"));
    if (m.rows() != n || m.cols() != n) {
        throw InputError(path + ": matrix size does not match n");
    }
    return SpdMatrix(m);
}

BLDatum read_bl_datum_file(const std::string& path) {
    const json j = read_json_file(path);
    const int n = j.at("n").get<int>();
    const Eigen::VectorXd p = vector_from_json(j.at("p"));
    std::vector<Eigen::MatrixXd> maps;
    for (const auto& bj : j.at("B")) maps.push_back(matrix_from_json(bj));
    return BLDatum(n, std::move(maps), p);
}

PositiveOperator read_operator_file(const std::string& path) {
    const json j = read_json_file(path);
    const int n = j.at("n").get<int>();
    std::vector<Eigen::MatrixXd> kraus;
    for (const auto& aj : j.at("A")) kraus.push_back(matrix_from_json(aj));
    for (const auto& a : kraus) {
        if (a.rows() != n || a.cols() != n) {
            throw InputError(path + ": Kraus matrix size does not match n");
        }
    }
    return PositiveOperator(std::move(kraus));
}

std::string trace_to_csv(const CurveTrace& trace,
                         const std::vector<std::pair<std::string, std::string>>& comments) {
    std::ostringstream out;
    for (const auto& [key, value] : comments) out << "# " << key << "=" << value << "\n";
    const int d = trace.points.empty() ? 0 : static_cast<int>(trace.points[0].size());
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",x_" << i;
    for (int i = 1; i <= d; ++i) out << ",v_" << i;
    out << "\n";
    for (size_t s = 0; s < trace.size(); ++s) {
        out << fmt_double(trace.times[s]);
        for (int i = 0; i < d; ++i) out << "," << fmt_double(trace.points[s](i));
        for (int i = 0; i < d; ++i) out << "," << fmt_double(trace.velocities[s](i));
        out << "\n";
    }
    return out.str();
}

json convexity_report_to_json(const ConvexityReport& report) {
    json j;
    j["verdict"] =
        report.verdict == ConvexityReport::Verdict::consistent ? "consistent" : "violated";
    j["samples"] = report.samples;
    j["min_second_difference"] = report.min_second_difference;
    j["seed"] = report.seed;
    j["t_grid_size"] = report.t_grid_size;
    if (report.witness) {
        json w;
        w["p"] = point_to_json(report.witness->p);
        w["q"] = point_to_json(report.witness->q);
        w["t"] = report.witness->t;
        w["gap"] = report.witness->gap;
        j["witness"] = std::move(w);
    }
    return j;
}

} // namespace gct::io
