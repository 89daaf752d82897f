#include "gpf/commands.hpp"

#include "gpf/errors.hpp"
#include "gpf/norm_est.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace gpf {

EstimatorOptions CommonOptions::estimator() const {
  EstimatorOptions e;
  e.restarts = restarts;
  e.seed = seed;
  e.use_p2_exact = p2_exact;
  return e;
}

ClassifyTolerances CommonOptions::tolerances() const {
  ClassifyTolerances t;
  t.tight = tol;
  return t;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json estimate_to_json(const BoundEstimate& e) {
  Json j;
  j["value"] = e.value;
  j["kind"] = to_string(e.kind);
  j["method"] = to_string(e.method);
  j["certified"] = e.certified;
  if (e.method == EstimateMethod::GradientRestarts) {
    j["restarts"] = e.restarts;
    j["seed"] = e.seed;
    j["best_restart"] = e.best_restart;
    j["iterations"] = e.iterations;
    j["converged"] = e.converged;
  }
  j["kernel_detected"] = e.kernel_detected;
  if (e.method == EstimateMethod::GridOracle) j["slack"] = e.slack;
  j["witness"] = vector_to_json(e.witness);
  return j;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

Json options_json(const CommonOptions& o) {
  Json j;
  j["seed"] = o.seed;
  j["restarts"] = o.restarts;
  j["p2_exact"] = o.p2_exact;
  j["rng"] = kRngAlgorithm;
  return j;
}

Json tolerances_json(const CommonOptions& o) {
  const auto t = o.tolerances();
  const auto e = o.estimator();
  Json j;
  j["tight_relative"] = t.tight;
  j["bessel_only_floor"] = t.lower_floor;
  j["rank_relative"] = e.rank_tolerance;
  j["stall_relative"] = e.stall_tolerance;
  j["stall_window"] = e.stall_window;
  j["max_iterations"] = e.max_iterations;
  j["armijo"] = e.armijo;
  return j;
}

Json frame_summary(const GPFusionFrame& f) {
  Json dims = Json::array();
  for (int d : f.block_dims()) dims.push_back(d);
  Json j;
  j["dim"] = f.dim();
  j["p"] = f.p();
  j["q"] = f.q();
  j["triples"] = f.size();
  j["block_dims"] = std::move(dims);
  return j;
}

Json bounds_json(const FrameBounds& b) {
  Json j;
  j["A"] = b.A();
  j["B"] = b.B();
  j["lower"] = estimate_to_json(b.lower);
  j["upper"] = estimate_to_json(b.upper);
  if (b.exact_lower) j["exact_lower"] = estimate_to_json(*b.exact_lower);
  if (b.exact_upper) j["exact_upper"] = estimate_to_json(*b.exact_upper);
  return j;
}

Json classification_json(const FrameClassification& c) {
  Json j;
  j["class"] = to_string(c.frame_class);
  j["A"] = c.lower_bound ? c.lower_bound->value : 0.0;
  j["B"] = c.bessel_bound ? c.bessel_bound->value : 0.0;
  j["stacked_rank"] = c.stacked_rank;
  j["kernel_detected"] = c.kernel_detected;
  return j;
}

Json predicted_json(const PredictedBounds& p) {
  Json j;
  j["theorem"] = p.provenance;
  j["lower"] = p.lower;
  j["upper"] = p.upper;
  return j;
}

Json table_row(const std::string& name, double predicted, double measured, bool ok) {
  Json j;
  j["quantity"] = name;
  j["predicted"] = predicted;
  j["measured"] = measured;
  j["ok"] = ok;
  return j;
}

int exit_for(FrameClass c) {
  switch (c) {
    case FrameClass::NotFrame:
      return kExitNotFrame;
    case FrameClass::BesselOnly:
      return kExitBesselOnly;
    default:
      return kExitOk;
  }
}

Json error_json(const std::exception& e) {
  Json j;
  j["message"] = e.what();
  if (auto* v = dynamic_cast<const ValidationError*>(&e)) {
    j["kind"] = "validation";
    j["field"] = v->field();
  } else if (auto* p = dynamic_cast<const ParseError*>(&e)) {
    j["kind"] = "parse";
    j["position"] = p->position();
  } else {
    j["kind"] = "usage";
  }
  return j;
}

void emit(CommandResult& r) { r.output = r.report.dump(2) + "\n"; }

// Runs `body`, turning any escaped exception into a usage/parse failure.
template <typename Body>
CommandResult guarded(const std::string& command, Json args, const CommonOptions* opts, Body&& body) {
  CommandResult r;
  r.report["command"] = command;
  r.report["args"] = std::move(args);
  if (opts) r.report["options"] = options_json(*opts);
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.report["error"] = error_json(e);
    r.exit_code = kExitUsage;
    r.summary += command + ": error: " + e.what() + "\n";
  }
  r.report["exit_code"] = r.exit_code;
  if (opts && opts->timing)
    r.report["timing_ms"] =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  emit(r);
  return r;
}

FrameDocument load(const std::string& path) { return parse_frame_document(read_text_file(path)); }

}  // namespace

CommandResult run_check(const std::string& file, const CommonOptions& opts, std::size_t duality_samples) {
  Json args;
  args["file"] = file;
  return guarded("check", std::move(args), &opts, [&](CommandResult& r) {
    const GPFusionFrame frame = load(file).frame;
    const auto est = opts.estimator();
    const FrameBounds bounds = estimate_bounds(frame, est);
    const auto cls = classify(frame, bounds, est, opts.tolerances());
    const auto duality = verify_duality(frame, duality_samples, opts.seed);
    const double perm = synthesis_permutation_residual(frame, 10, opts.seed);
    const auto riesz = check_riesz(frame, est);
    const auto surj = verify_surjectivity_characterization(frame, est);

    r.report["tolerances"] = tolerances_json(opts);
    r.report["frame"] = frame_summary(frame);
    r.report["bounds"] = bounds_json(bounds);
    Json c = classification_json(cls);
    c["gf_complete"] = is_gf_complete(frame, est.rank_tolerance);
    r.report["classification"] = std::move(c);

    Json d;
    d["max_residual"] = duality.max_residual;
    d["samples"] = duality.samples;
    d["threshold"] = 1e-10;
    d["pass"] = duality.max_residual <= 1e-10;
    r.report["duality"] = std::move(d);
    Json p;
    p["permutations"] = 10;
    p["max_relative_change"] = perm;
    r.report["synthesis_permutation"] = std::move(p);

    Json s;
    s["synthesis_rank"] = surj.synthesis_rank;
    s["synthesis_surjective"] = surj.synthesis_surjective;
    s["frame_iff_surjective"] = surj.frame_equivalence_holds;
    r.report["surjectivity"] = std::move(s);

    Json rz;
    rz["is_riesz"] = riesz.is_riesz;
    rz["gf_complete"] = riesz.gf_complete;
    rz["lower_sandwich"] = riesz.lower_sandwich.value;
    rz["upper_sandwich"] = riesz.upper_sandwich.value;
    rz["subsets_checked"] = riesz.subsets_checked;
    rz["subset_check"] = riesz.subsets_sampled ? "sampled" : "exhaustive";
    r.report["riesz"] = std::move(rz);

    r.exit_code = exit_for(cls.frame_class);
    r.report["verdict"] = to_string(cls.frame_class);
    r.summary += "check: " + std::string(to_string(cls.frame_class)) + "  A=" + num(bounds.A()) +
                 "  B=" + num(bounds.B()) + "  rank=" + std::to_string(cls.stacked_rank) + "/" +
                 std::to_string(frame.dim()) + "  duality residual=" + num(duality.max_residual) + "\n";
  });
}

CommandResult run_perturb(const PerturbArgs& a, const CommonOptions& opts) {
  Json args;
  args["lambda_file"] = a.lambda_file;
  args["gamma_file"] = a.gamma_file;
  args["mode"] = a.radius_mode ? "radius" : "parameters";
  if (!a.radius_mode) {
    args["lambda1"] = a.lambda1;
    args["lambda2"] = a.lambda2;
    args["mu"] = a.mu;
  }
  return guarded("perturb", std::move(args), &opts, [&](CommandResult& r) {
    const GPFusionFrame lambda = load(a.lambda_file).frame;
    const GPFusionFrame gamma = load(a.gamma_file).frame;
    const auto est = opts.estimator();
    r.report["tolerances"] = tolerances_json(opts);
    const FrameBounds lb = estimate_bounds(lambda, est);
    const auto lcls = classify(lambda, lb, est, opts.tolerances());
    const double A = lb.A(), B = lb.B();
    Json ref;
    ref["A"] = A;
    ref["B"] = B;
    ref["class"] = to_string(lcls.frame_class);
    r.report["reference"] = std::move(ref);

    auto inapplicable = [&](const std::string& why) {
      r.report["theorem_applicable"] = false;
      r.report["reason"] = why;
      r.report["verdict"] = "theorem inapplicable";
      r.exit_code = kExitInapplicable;
      r.summary += "perturb: theorem inapplicable: " + why + "\n";
    };
    if (!is_frame_class(lcls.frame_class)) {
      inapplicable("reference family is not a frame (" + std::string(to_string(lcls.frame_class)) + ")");
      return;
    }

    PredictedBounds predicted;
    if (a.radius_mode) {
      const BoundEstimate R = measure_perturbation_radius(lambda, gamma, est);
      Json h;
      h["R"] = estimate_to_json(R);
      h["condition"] = "0 < R < A";
      r.report["hypothesis"] = std::move(h);
      if (R.value >= A) {
        inapplicable("measured R = " + num(R.value) + " is not below A = " + num(A));
        return;
      }
      // R = 0 is the limit of the admissible range: the bounds are (A, B).
      predicted = R.value > 0.0 ? simple_perturbation_bounds(A, B, R.value)
                                : PredictedBounds{A, B, "perturbation-2"};
    } else {
      const PerturbationParams params(a.lambda1, a.lambda2, a.mu);
      params.validate_against(A, B);
      const auto check = perturbation_condition_holds(lambda, gamma, params, est);
      Json h;
      h["condition"] = "||(Lambda-Gamma)f|| <= l1||Lambda f|| + l2||Gamma f|| + mu||f||";
      h["max_violation"] = check.max_violation;
      h["threshold"] = 1e-9;
      h["holds"] = check.holds;
      h["witness"] = vector_to_json(check.witness);
      r.report["hypothesis"] = std::move(h);
      if (!check.holds) {
        inapplicable("perturbation inequality violated by " + num(check.max_violation));
        return;
      }
      predicted = predicted_perturbed_bounds(A, B, params);
    }
    r.report["theorem_applicable"] = true;
    r.report["predicted"] = predicted_json(predicted);
    const FrameBounds gb = estimate_bounds(gamma, est);
    constexpr double tol = 1e-6;
    const bool lo_ok = gb.A() >= predicted.lower - tol;
    const bool hi_ok = gb.B() <= predicted.upper + tol;
    r.report["measured"] = bounds_json(gb);
    r.report["table"] = Json::array({table_row("lower", predicted.lower, gb.A(), lo_ok),
                                     table_row("upper", predicted.upper, gb.B(), hi_ok)});
    r.report["tolerance"] = tol;
    const bool pass = lo_ok && hi_ok;
    r.report["verdict"] = pass ? "pass" : "fail";
    r.exit_code = pass ? kExitOk : kExitVerificationFailed;
    r.summary += "perturb (" + predicted.provenance + "): predicted [" + num(predicted.lower) + ", " +
                 num(predicted.upper) + "], measured (" + num(gb.A()) + ", " + num(gb.B()) + ") -> " +
                 (pass ? "pass" : "FAIL") + "\n";
  });
}

CommandResult run_combine(const CombineArgs& a, const CommonOptions& opts) {
  Json args;
  args["x_file"] = a.x_file;
  args["y_file"] = a.y_file;
  args["mode"] = a.mode == CombineMode::DirectSum ? "direct-sum" : "tensor";
  if (a.out_file) args["out"] = *a.out_file;
  return guarded("combine", std::move(args), &opts, [&](CommandResult& r) {
    const GPFusionFrame x = load(a.x_file).frame;
    const GPFusionFrame y = load(a.y_file).frame;
    const auto est = opts.estimator();
    r.report["tolerances"] = tolerances_json(opts);

    std::optional<GPFusionFrame> combined;
    PredictedBounds predicted;
    Json extra;
    if (a.mode == CombineMode::DirectSum) {
      auto c = direct_sum(x, y, est);
      combined.emplace(std::move(c.frame));
      predicted = c.predicted;
    } else {
      auto t = tensor_product(x, y, est);
      const auto conv = tensor_converse_extract(t, est);
      auto side = [](const FactorBounds& f) {
        Json j;
        j["lower"] = f.lower;
        j["upper"] = f.upper;
        j["theorem_lower"] = f.theorem_lower;
        j["theorem_upper"] = f.theorem_upper;
        j["direct_lower"] = f.direct_lower;
        j["direct_upper"] = f.direct_upper;
        j["class"] = to_string(f.frame_class);
        return j;
      };
      extra["left"] = side(conv.left);
      extra["right"] = side(conv.right);
      extra["samples"] = conv.samples;
      extra["factors_are_frames"] = conv.factors_are_frames;
      combined.emplace(std::move(t.frame));
      predicted = t.predicted;
    }
    const FrameBounds mb = estimate_bounds(*combined, est);
    constexpr double tol = 1e-6;
    const bool lo_ok = mb.A() >= predicted.lower - tol;
    const bool hi_ok = mb.B() <= predicted.upper + tol;
    r.report["predicted"] = predicted_json(predicted);
    r.report["measured"] = bounds_json(mb);
    r.report["table"] = Json::array({table_row("lower", predicted.lower, mb.A(), lo_ok),
                                     table_row("upper", predicted.upper, mb.B(), hi_ok)});
    r.report["tolerance"] = tol;
    if (!extra.is_null()) r.report["converse"] = std::move(extra);

    Json meta;
    meta["combined_from"] = {a.x_file, a.y_file};
    meta["mode"] = a.mode == CombineMode::DirectSum ? "direct-sum" : "tensor";
    const Json spec = frame_to_json(*combined, meta);
    r.report["combined_frame"] = spec;
    if (a.out_file) {
      std::ofstream out(*a.out_file, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write '" + *a.out_file + "'");
      out << spec.dump(2) << "\n";
    }
    const bool pass = lo_ok && hi_ok;
    r.report["verdict"] = pass ? "pass" : "fail";
    r.exit_code = pass ? kExitOk : kExitVerificationFailed;
    r.summary += "combine (" + std::string(a.mode == CombineMode::DirectSum ? "direct-sum" : "tensor") +
                 "): predicted [" + num(predicted.lower) + ", " + num(predicted.upper) + "], measured (" +
                 num(mb.A()) + ", " + num(mb.B()) + ") -> " + (pass ? "pass" : "FAIL") + "\n";
  });
}

CommandResult run_riesz(const std::string& file, const CommonOptions& opts) {
  Json args;
  args["file"] = file;
  return guarded("riesz", std::move(args), &opts, [&](CommandResult& r) {
    const GPFusionFrame frame = load(file).frame;
    const auto est = opts.estimator();
    const auto riesz = check_riesz(frame, est);
    const auto surj = verify_surjectivity_characterization(frame, est);
    r.report["tolerances"] = tolerances_json(opts);
    r.report["frame"] = frame_summary(frame);
    Json rz;
    rz["gf_complete"] = riesz.gf_complete;
    rz["lower_sandwich"] = estimate_to_json(riesz.lower_sandwich);
    rz["upper_sandwich"] = estimate_to_json(riesz.upper_sandwich);
    rz["synthesis_injective"] = riesz.synthesis_injective;
    rz["subsets_checked"] = riesz.subsets_checked;
    rz["subset_check"] = riesz.subsets_sampled ? "sampled" : "exhaustive";
    rz["is_riesz"] = riesz.is_riesz;
    r.report["riesz"] = std::move(rz);
    Json s;
    s["frame_class"] = to_string(surj.frame_class);
    s["synthesis_rank"] = surj.synthesis_rank;
    s["synthesis_surjective"] = surj.synthesis_surjective;
    s["analysis_surjective"] = surj.analysis_surjective;
    s["frame_iff_surjective"] = surj.frame_equivalence_holds;
    s["riesz_iff_injective"] = surj.riesz_equivalence_holds;
    r.report["characterization"] = std::move(s);
    r.report["verdict"] = riesz.is_riesz ? "riesz" : "not riesz";
    r.exit_code = riesz.is_riesz ? kExitOk : kExitNotFrame;
    r.summary += "riesz: " + std::string(riesz.is_riesz ? "Riesz basis" : "not a Riesz basis") +
                 "  sandwich [" + num(riesz.lower_sandwich.value) + ", " + num(riesz.upper_sandwich.value) +
                 "] over " + std::to_string(riesz.subsets_checked) + " subfamilies\n";
  });
}

CommandResult run_gen(const GenRequest& request) {
  CommandResult r;
  try {
    const GPFusionFrame frame = generate_frame(request);
    r.output = serialize_frame_spec(frame, generation_metadata(request));
    r.summary = "gen: " + std::string(to_string(request.target)) + " family, dim " +
                std::to_string(request.dim) + ", " + std::to_string(request.block_dims.size()) +
                " triples, seed " + std::to_string(request.seed) + "\n";
  } catch (const std::exception& e) {
    r.exit_code = kExitUsage;
    r.report["command"] = "gen";
    r.report["error"] = error_json(e);
    r.report["exit_code"] = r.exit_code;
    r.output = r.report.dump(2) + "\n";
    r.summary = std::string("gen: error: ") + e.what() + "\n";
  }
  return r;
}

}  // namespace gpf
