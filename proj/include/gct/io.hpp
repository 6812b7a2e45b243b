#pragma once

#include <json.hpp>
#include <string>

#include "gct/brascamp_lieb.hpp"
#include "gct/connection.hpp"
#include "gct/gconvex.hpp"
#include "gct/operator_scaling.hpp"

namespace gct::io {

using json = nlohmann::json;

// Fixed-width round-trippable rendering used for every CSV number.
std::string fmt_double(double v);

json matrix_to_json(const Eigen::MatrixXd& m); // row-major nested arrays
Eigen::MatrixXd matrix_from_json(const json& j);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

json point_to_json(const Point& p);
Point point_from_json(const json& j);
json tangent_to_json(const Tangent& v);
Tangent tangent_from_json(const json& j);

// File formats:
//   SPD point  {"n": int, "P": [[real]]}
//   BL datum   {"n": int, "p": [real], "B": [[[real]]]}
//   operator   {"n": int, "A": [[[real]]]}
SpdMatrix read_spd_file(const std::string& path);
BLDatum read_bl_datum_file(const std::string& path);
PositiveOperator read_operator_file(const std::string& path);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// CurveTrace CSV: header `t,x_1..x_d,v_1..v_d`, one row per sample. The
// comment lines (provenance echo) are emitted first, prefixed with '# '.
std::string trace_to_csv(const CurveTrace& trace,
                         const std::vector<std::pair<std::string, std::string>>& comments = {});

json convexity_report_to_json(const ConvexityReport& report);

} // namespace gct::io
