#pragma once

#include "gpf/gframe.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace gpf {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kFrameSpecVersion = "gpf-frame/1";

struct FrameDocument {
  GPFusionFrame frame;
  Json metadata = Json::object();
};

/// Parses and validates a frame spec file.
///
///   {"version": "gpf-frame/1",
///    "space": {"dim": n, "p": p},
///    "triples": [{"projection": {"basis": [[...], ...]} | {"matrix": [[...], ...]},
///                 "lambda_matrix": [[...], ...],
///                 "weight": w}, ...],
///    "metadata": {...}}
///
/// Syntax errors throw ParseError (byte offset plus line:column in the
/// message); invariant violations throw ValidationError naming the field.
FrameDocument parse_frame_document(std::string_view text);
GPFusionFrame parse_frame_spec(std::string_view text);

/// Same schema, reading an already parsed JSON value.
FrameDocument frame_from_json(const Json& doc);

/// Least-squares projections are written as their stored basis, oblique
/// ones as their matrix. Doubles are written in shortest round-trip form.
Json frame_to_json(const GPFusionFrame& frame, const Json& metadata = Json::object());
std::string serialize_frame_spec(const GPFusionFrame& frame, const Json& metadata = Json::object());

/// Same n, p, weights and matrices (projection and local operator) to `tol`.
bool frames_equal(const GPFusionFrame& a, const GPFusionFrame& b, double tol = 1e-15);

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

}  // namespace gpf
