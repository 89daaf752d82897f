#include "gpf/commands.hpp"
#include "gpf/constructions.hpp"
#include "gpf/errors.hpp"
#include "gpf/frame_spec.hpp"
#include "gpf/generate.hpp"
#include "gpf/gframe.hpp"
#include "gpf/norm_est.hpp"
#include "gpf/pnorm.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace gpf;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

EstimatorOptions options(std::uint64_t seed, int restarts, bool p2_exact) {
  EstimatorOptions o;
  o.seed = seed;
  o.restarts = restarts;
  o.use_p2_exact = p2_exact;
  return o;
}

CommonOptions common(std::uint64_t seed, int restarts, double tol, bool p2_exact) {
  CommonOptions o;
  o.seed = seed;
  o.restarts = restarts;
  o.tol = tol;
  o.p2_exact = p2_exact;
  return o;
}

py::dict bounds_dict(const FrameBounds& b) {
  py::dict d;
  d["A"] = b.A();
  d["B"] = b.B();
  d["lower"] = to_py(estimate_to_json(b.best_lower()));
  d["upper"] = to_py(estimate_to_json(b.best_upper()));
  return d;
}

py::tuple predicted_tuple(const PredictedBounds& p) { return py::make_tuple(p.lower, p.upper, p.provenance); }

py::tuple command_tuple(const CommandResult& r) { return py::make_tuple(to_py(r.report), r.exit_code); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized p-fusion frames over R^n with l^p norms.";

  auto base = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<RankError>(m, "RankError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  (void)base;

  m.attr("RNG_ALGORITHM") = std::string(kRngAlgorithm);

  m.def("p_norm", [](const Vector& v, double p) { return p_norm(v, p); }, py::arg("v"), py::arg("p"));
  m.def("dual_exponent", &dual_exponent, py::arg("p"));
  m.def("duality_map", [](const Vector& v, double p) { return duality_map(v, p); }, py::arg("v"), py::arg("p"));

  py::class_<SubspaceProjection>(m, "Projection")
      .def_static("from_basis", &SubspaceProjection::from_basis, py::arg("basis"))
      .def_static(
          "from_matrix", [](const Matrix& p) { return SubspaceProjection::from_matrix(LinOp(p)); }, py::arg("matrix"))
      .def_static("along", &SubspaceProjection::along, py::arg("range_basis"), py::arg("kernel_basis"))
      .def_static("identity", &SubspaceProjection::identity, py::arg("n"))
      .def_property_readonly("matrix", [](const SubspaceProjection& p) { return p.matrix().matrix(); })
      .def_property_readonly("rank", &SubspaceProjection::rank)
      .def_property_readonly("oblique",
                             [](const SubspaceProjection& p) { return p.origin() == SubspaceProjection::Origin::Oblique; });

  py::class_<GPFusionFrame>(m, "Frame")
      .def(py::init([](double p, const std::vector<std::tuple<std::optional<SubspaceProjection>, Matrix, double>>& ts) {
             if (ts.empty()) throw ContractError("a frame needs at least one triple");
             std::vector<WeightedTriple> triples;
             for (const auto& [proj, lambda, w] : ts) {
               const int n = static_cast<int>(lambda.cols());
               triples.emplace_back(proj ? *proj : SubspaceProjection::identity(n), LinOp(lambda), w);
             }
             const int n = triples.front().ambient_dim();
             return GPFusionFrame(PNormSpace(n, p), std::move(triples));
           }),
           py::arg("p"), py::arg("triples"),
           "Triples are (projection or None, lambda_matrix, weight); None means the identity projection.")
      .def_property_readonly("dim", &GPFusionFrame::dim)
      .def_property_readonly("p", &GPFusionFrame::p)
      .def_property_readonly("q", &GPFusionFrame::q)
      .def_property_readonly("block_dims", &GPFusionFrame::block_dims)
      .def_property_readonly("weights",
                             [](const GPFusionFrame& f) {
                               std::vector<double> w;
                               for (const auto& t : f.triples()) w.push_back(t.weight());
                               return w;
                             })
      .def_property_readonly("analysis_matrix", [](const GPFusionFrame& f) { return f.analysis_matrix().matrix(); })
      .def_property_readonly("synthesis_matrix", [](const GPFusionFrame& f) { return f.synthesis_matrix().matrix(); })
      .def("__len__", &GPFusionFrame::size)
      .def("analysis", [](const GPFusionFrame& f, const Vector& x) { return analysis_apply(f, x).blocks(); },
           py::arg("f"))
      .def("synthesis",
           [](const GPFusionFrame& f, const std::vector<Vector>& g) {
             return synthesis_apply(f, DualMixedSeq(g, f.q()));
           },
           py::arg("g"))
      .def("scaled_weights", &GPFusionFrame::scaled_weights, py::arg("c"))
      .def("to_json", [](const GPFusionFrame& f) { return serialize_frame_spec(f); })
      .def_static("from_json", [](const std::string& text) { return parse_frame_spec(text); }, py::arg("text"));

  m.def("estimate_bounds",
        [](const GPFusionFrame& f, std::uint64_t seed, int restarts, bool p2_exact) {
          return bounds_dict(estimate_bounds(f, options(seed, restarts, p2_exact)));
        },
        py::arg("frame"), py::arg("seed") = 0, py::arg("restarts") = 20, py::arg("p2_exact") = true);
  m.def("classify",
        [](const GPFusionFrame& f, std::uint64_t seed, int restarts, double tol) {
          ClassifyTolerances t;
          t.tight = tol;
          return std::string(to_string(classify(f, options(seed, restarts, true), t).frame_class));
        },
        py::arg("frame"), py::arg("seed") = 0, py::arg("restarts") = 20, py::arg("tol") = 1e-6);
  m.def("rescale_to_parseval",
        [](const GPFusionFrame& f, std::uint64_t seed) { return rescale_to_parseval(f, options(seed, 20, true)); },
        py::arg("frame"), py::arg("seed") = 0);
  m.def("is_gf_complete", &is_gf_complete, py::arg("frame"), py::arg("rank_tolerance") = 1e-10);
  m.def("check_riesz",
        [](const GPFusionFrame& f, std::uint64_t seed) {
          const auto r = check_riesz(f, options(seed, 20, true));
          py::dict d;
          d["is_riesz"] = r.is_riesz;
          d["gf_complete"] = r.gf_complete;
          d["synthesis_injective"] = r.synthesis_injective;
          d["lower"] = r.lower_sandwich.value;
          d["upper"] = r.upper_sandwich.value;
          d["subsets_checked"] = r.subsets_checked;
          d["subsets_sampled"] = r.subsets_sampled;
          return d;
        },
        py::arg("frame"), py::arg("seed") = 0);
  m.def("verify_duality",
        [](const GPFusionFrame& f, std::size_t samples, std::uint64_t seed) {
          return verify_duality(f, samples, seed).max_residual;
        },
        py::arg("frame"), py::arg("samples") = 100, py::arg("seed") = 0);

  m.def("generate",
        [](int dim, std::vector<int> block_dims, double p, std::uint64_t seed, const std::string& cls) {
          GenRequest r;
          r.dim = dim;
          r.block_dims = std::move(block_dims);
          r.p = p;
          r.seed = seed;
          r.target = parse_gen_class(cls);
          return generate_frame(r);
        },
        py::arg("dim"), py::arg("block_dims"), py::arg("p") = 2.0, py::arg("seed") = 0, py::arg("cls") = "frame");

  m.def("direct_sum",
        [](const GPFusionFrame& x, const GPFusionFrame& y, std::uint64_t seed) {
          auto c = direct_sum(x, y, options(seed, 20, true));
          return py::make_tuple(c.frame, predicted_tuple(c.predicted));
        },
        py::arg("x"), py::arg("y"), py::arg("seed") = 0);
  m.def("tensor_product",
        [](const GPFusionFrame& x, const GPFusionFrame& y, std::uint64_t seed) {
          auto t = tensor_product(x, y, options(seed, 20, true));
          return py::make_tuple(t.frame, predicted_tuple(t.predicted));
        },
        py::arg("x"), py::arg("y"), py::arg("seed") = 0);
  m.def("measure_perturbation_radius",
        [](const GPFusionFrame& a, const GPFusionFrame& b, std::uint64_t seed) {
          return measure_perturbation_radius(a, b, options(seed, 20, true)).value;
        },
        py::arg("lambda_frame"), py::arg("gamma_frame"), py::arg("seed") = 0);
  m.def("perturbation_condition_holds",
        [](const GPFusionFrame& a, const GPFusionFrame& b, double l1, double l2, double mu, std::uint64_t seed) {
          const auto c = perturbation_condition_holds(a, b, PerturbationParams(l1, l2, mu), options(seed, 20, true));
          return py::make_tuple(c.holds, c.max_violation);
        },
        py::arg("lambda_frame"), py::arg("gamma_frame"), py::arg("lambda1"), py::arg("lambda2"), py::arg("mu"),
        py::arg("seed") = 0);
  m.def("predicted_perturbed_bounds",
        [](double A, double B, double l1, double l2, double mu) {
          return predicted_tuple(predicted_perturbed_bounds(A, B, PerturbationParams(l1, l2, mu)));
        },
        py::arg("A"), py::arg("B"), py::arg("lambda1"), py::arg("lambda2"), py::arg("mu"));
  m.def("simple_perturbation_bounds",
        [](double A, double B, double R) { return predicted_tuple(simple_perturbation_bounds(A, B, R)); },
        py::arg("A"), py::arg("B"), py::arg("R"));

  m.def("run_check",
        [](const std::string& file, std::uint64_t seed, int restarts, double tol, bool p2_exact) {
          return command_tuple(run_check(file, common(seed, restarts, tol, p2_exact)));
        },
        py::arg("file"), py::arg("seed") = 0, py::arg("restarts") = 20, py::arg("tol") = 1e-6,
        py::arg("p2_exact") = true, "Returns (report, exit_code).");
  m.def("run_riesz",
        [](const std::string& file, std::uint64_t seed, int restarts, double tol, bool p2_exact) {
          return command_tuple(run_riesz(file, common(seed, restarts, tol, p2_exact)));
        },
        py::arg("file"), py::arg("seed") = 0, py::arg("restarts") = 20, py::arg("tol") = 1e-6,
        py::arg("p2_exact") = true, "Returns (report, exit_code).");
}
