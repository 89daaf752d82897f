// gpf: check, perturb, combine and generate g-p-fusion frame files.
//
// Reports go to stdout as JSON, a one-line summary to stderr. Exit codes:
// 0 frame/pass, 1 usage or parse error, 2 Bessel-only, 3 not a frame,
// 4 theorem inapplicable, 5 predicted bounds not confirmed.

#include "gpf/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

void add_common(CLI::App* app, gpf::CommonOptions& o) {
  app->add_option("--seed", o.seed, "Seed for every random stream")->capture_default_str();
  app->add_option("--restarts", o.restarts, "Gradient restarts per estimate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--tol", o.tol, "Relative gap under which A = B counts as tight")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_flag("--p2-exact,!--no-p2-exact", o.p2_exact, "Use SVD bounds when p = 2")->capture_default_str();
  app->add_flag("--timing", o.timing, "Add wall-clock timing to the report");
}

int finish(const gpf::CommandResult& r) {
  std::cout << r.output;
  std::cerr << r.summary;
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"g-p-fusion frame toolkit"};
  app.require_subcommand(1);

  gpf::CommonOptions common;

  std::string check_file;
  auto* check = app.add_subcommand("check", "Estimate bounds and classify a frame file");
  check->add_option("file", check_file, "Frame file (JSON)")->required();
  std::size_t samples = 100;
  check->add_option("--samples", samples, "Random (f, g) pairs for the duality check")->capture_default_str();
  add_common(check, common);

  gpf::PerturbArgs pa;
  auto* perturb = app.add_subcommand("perturb", "Compare a perturbed family against predicted bounds");
  perturb->add_option("lambda", pa.lambda_file, "Reference frame file")->required();
  perturb->add_option("gamma", pa.gamma_file, "Perturbed family file")->required();
  auto* radius = perturb->add_flag("--radius", pa.radius_mode, "Use the measured radius R (needs 0 < R < A)");
  auto* l1 = perturb->add_option("--lambda1", pa.lambda1, "lambda1 in (-1, 1)");
  auto* l2 = perturb->add_option("--lambda2", pa.lambda2, "lambda2 in (-1, 1)");
  auto* mu = perturb->add_option("--mu", pa.mu, "mu with -(1+lambda1)B <= mu <= (1-lambda1)A");
  radius->excludes(l1)->excludes(l2)->excludes(mu);
  add_common(perturb, common);

  gpf::CombineArgs ca;
  std::string out_file;
  auto* combine = app.add_subcommand("combine", "Direct sum or tensor product of two frames");
  combine->add_option("x", ca.x_file, "First frame file")->required();
  combine->add_option("y", ca.y_file, "Second frame file")->required();
  bool direct = false, tensor = false;
  auto* ds = combine->add_flag("--direct-sum", direct, "Block-diagonal sum on R^{n+m}");
  auto* tp = combine->add_flag("--tensor", tensor, "Kronecker product on R^{nm}");
  ds->excludes(tp);
  combine->add_option("--out", out_file, "Write the combined frame file here");
  add_common(combine, common);

  std::string riesz_file;
  auto* riesz = app.add_subcommand("riesz", "Check the Riesz basis conditions");
  riesz->add_option("file", riesz_file, "Frame file (JSON)")->required();
  add_common(riesz, common);

  gpf::GenRequest gen_req;
  int blocks = 0;
  std::string gen_class = "frame";
  auto* gen = app.add_subcommand("gen", "Emit a seeded random frame file");
  gen->add_option("--dim", gen_req.dim, "Ambient dimension n")->required()->check(CLI::PositiveNumber);
  gen->add_option("--blocks", blocks, "Number of triples (block dims default to 1)")->check(CLI::PositiveNumber);
  gen->add_option("--block-dims", gen_req.block_dims, "Block dimensions d_i")->delimiter(',');
  gen->add_option("--p", gen_req.p, "Exponent p in (1, inf)")->capture_default_str();
  gen->add_option("--seed", gen_req.seed, "Generator seed")->capture_default_str();
  gen->add_option("--class", gen_class, "any | frame | tight | parseval | deficient")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gpf::kExitUsage;
  }

  if (*check) return finish(gpf::run_check(check_file, common, samples));
  if (*perturb) {
    if (!pa.radius_mode && l1->count() + l2->count() + mu->count() == 0) {
      std::cerr << "perturb: give --radius or at least one of --lambda1/--lambda2/--mu\n";
      return gpf::kExitUsage;
    }
    return finish(gpf::run_perturb(pa, common));
  }
  if (*combine) {
    if (direct == tensor) {
      std::cerr << "combine: choose exactly one of --direct-sum or --tensor\n";
      return gpf::kExitUsage;
    }
    ca.mode = tensor ? gpf::CombineMode::Tensor : gpf::CombineMode::DirectSum;
    if (!out_file.empty()) ca.out_file = out_file;
    return finish(gpf::run_combine(ca, common));
  }
  if (*riesz) return finish(gpf::run_riesz(riesz_file, common));
  if (*gen) {
    try {
      gen_req.target = gpf::parse_gen_class(gen_class);
    } catch (const std::exception& e) {
      std::cerr << "gen: " << e.what() << "\n";
      return gpf::kExitUsage;
    }
    if (gen->get_option("--block-dims")->count() == 0) {
      gen_req.block_dims.assign(static_cast<std::size_t>(blocks > 0 ? blocks : 2), 1);
    } else if (blocks > 0 && static_cast<std::size_t>(blocks) != gen_req.block_dims.size()) {
      std::cerr << "gen: --blocks disagrees with the number of --block-dims entries\n";
      return gpf::kExitUsage;
    }
    return finish(gpf::run_gen(gen_req));
  }
  return gpf::kExitUsage;
}
