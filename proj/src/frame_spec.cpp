#include "gpf/frame_spec.hpp"

#include "gpf/errors.hpp"

#include <cmath>
#include <string>

namespace gpf {

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "." + key, "missing field");
  return *it;
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(path, "must be finite");
  return x;
}

Vector vector_of(const Json& v, const std::string& path, Eigen::Index expected_len) {
  if (!v.is_array()) throw ValidationError(path, "expected an array of numbers");
  if (expected_len >= 0 && static_cast<Eigen::Index>(v.size()) != expected_len)
    throw ValidationError(path, "expected " + std::to_string(expected_len) + " entries, got " +
                                    std::to_string(v.size()));
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = number(v[k], path + "[" + std::to_string(k) + "]");
  return out;
}

Matrix matrix_of(const Json& v, const std::string& path, Eigen::Index cols) {
  if (!v.is_array() || v.empty()) throw ValidationError(path, "expected a non-empty array of rows");
  Matrix m(static_cast<Eigen::Index>(v.size()), cols);
  for (std::size_t r = 0; r < v.size(); ++r)
    m.row(static_cast<Eigen::Index>(r)) = vector_of(v[r], path + "[" + std::to_string(r) + "]", cols).transpose();
  return m;
}

template <typename Fn>
auto guarded(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(path, e.what());
  }
}

SubspaceProjection projection_of(const Json& v, const std::string& path, int n) {
  if (!v.is_object()) throw ValidationError(path, "expected an object with 'basis' or 'matrix'");
  const bool has_basis = v.contains("basis");
  const bool has_matrix = v.contains("matrix");
  if (has_basis == has_matrix) throw ValidationError(path, "exactly one of 'basis' or 'matrix' is required");
  if (has_basis) {
    const std::string bp = path + ".basis";
    const Json& b = v["basis"];
    if (!b.is_array() || b.empty()) throw ValidationError(bp, "projection must be non-trivial: empty basis");
    std::vector<Vector> basis;
    for (std::size_t k = 0; k < b.size(); ++k)
      basis.push_back(vector_of(b[k], bp + "[" + std::to_string(k) + "]", n));
    return guarded(bp, [&] { return SubspaceProjection::from_basis(basis); });
  }
  const std::string mp = path + ".matrix";
  const Matrix m = matrix_of(v["matrix"], mp, n);
  if (m.rows() != n) throw ValidationError(mp, "expected " + std::to_string(n) + " rows");
  return guarded(mp, [&] { return SubspaceProjection::from_matrix(LinOp(m)); });
}

}  // namespace

FrameDocument frame_from_json(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("$", "expected a JSON object");
  const Json& version = require(doc, "version", "$");
  if (!version.is_string() || version.get<std::string>() != kFrameSpecVersion)
    throw ValidationError("version", "unsupported version, expected \"" + std::string(kFrameSpecVersion) + "\"");

  const Json& space = require(doc, "space", "$");
  const Json& jdim = require(space, "dim", "space");
  if (!jdim.is_number_integer() || jdim.get<long long>() < 1)
    throw ValidationError("space.dim", "must be a positive integer");
  const int n = static_cast<int>(jdim.get<long long>());
  const double p = number(require(space, "p", "space"), "space.p");
  if (!(p > 1.0)) throw ValidationError("space.p", "must satisfy 1 < p < inf");

  const Json& jtriples = require(doc, "triples", "$");
  if (!jtriples.is_array() || jtriples.empty())
    throw ValidationError("triples", "a frame needs at least one triple");

  std::vector<WeightedTriple> triples;
  for (std::size_t i = 0; i < jtriples.size(); ++i) {
    const std::string path = "triples[" + std::to_string(i) + "]";
    const Json& t = jtriples[i];
    if (!t.is_object()) throw ValidationError(path, "expected an object");
    SubspaceProjection proj = projection_of(require(t, "projection", path), path + ".projection", n);
    const Matrix lambda = matrix_of(require(t, "lambda_matrix", path), path + ".lambda_matrix", n);
    const double w = number(require(t, "weight", path), path + ".weight");
    if (!(w > 0.0)) throw ValidationError(path + ".weight", "weight must be > 0");
    triples.push_back(guarded(path, [&] { return WeightedTriple(proj, LinOp(lambda), w); }));
  }

  Json metadata = Json::object();
  if (auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) throw ValidationError("metadata", "expected an object");
    metadata = *it;
  }
  return {guarded("$", [&] { return GPFusionFrame(PNormSpace(n, p), std::move(triples)); }),
          std::move(metadata)};
}

FrameDocument parse_frame_document(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("JSON syntax error at " + line_col(text, at) + " (byte " + std::to_string(e.byte) +
                         "): " + e.what(),
                     e.byte);
  }
  return frame_from_json(doc);
}

GPFusionFrame parse_frame_spec(std::string_view text) { return parse_frame_document(text).frame; }

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Json frame_to_json(const GPFusionFrame& frame, const Json& metadata) {
  Json doc;
  doc["version"] = kFrameSpecVersion;
  doc["space"] = {{"dim", frame.dim()}, {"p", frame.p()}};
  Json triples = Json::array();
  for (const auto& t : frame.triples()) {
    Json proj;
    if (t.projection().origin() == SubspaceProjection::Origin::LeastSquares) {
      Json basis = Json::array();
      for (const auto& b : t.projection().basis()) basis.push_back(vector_to_json(b));
      proj["basis"] = std::move(basis);
    } else {
      proj["matrix"] = matrix_to_json(t.projection().matrix().matrix());
    }
    Json jt;
    jt["projection"] = std::move(proj);
    jt["lambda_matrix"] = matrix_to_json(t.local_op().matrix());
    jt["weight"] = t.weight();
    triples.push_back(std::move(jt));
  }
  doc["triples"] = std::move(triples);
  doc["metadata"] = metadata.is_object() ? metadata : Json::object();
  return doc;
}

std::string serialize_frame_spec(const GPFusionFrame& frame, const Json& metadata) {
  return frame_to_json(frame, metadata).dump(2) + "\n";
}

bool frames_equal(const GPFusionFrame& a, const GPFusionFrame& b, double tol) {
  if (a.dim() != b.dim() || a.p() != b.p() || a.size() != b.size()) return false;
  auto close = [tol](const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    return ((x - y).cwiseAbs().array() <= tol * (1.0 + y.cwiseAbs().array())).all();
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& s = a.triple(i);
    const auto& t = b.triple(i);
    if (std::abs(s.weight() - t.weight()) > tol * (1.0 + std::abs(t.weight()))) return false;
    if (!close(s.projection().matrix().matrix(), t.projection().matrix().matrix())) return false;
    if (!close(s.local_op().matrix(), t.local_op().matrix())) return false;
  }
  return true;
}

}  // namespace gpf
