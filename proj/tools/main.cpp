#include "commands.hpp"

#include "qcr/errors.hpp"
#include "qcr/reparam.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

int exit_code(qcr::ErrorCode c) {
  switch (c) {
    case qcr::ErrorCode::InputError:
      return 2;
    case qcr::ErrorCode::PipelineBudgetExceeded:
      return 4;
    default:
      return 3;
  }
}

std::string escaped(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch == '\n' ? ' ' : ch;
  }
  return out;
}

void error_record(std::string_view code, const std::string& message) {
  std::cerr << "error code=" << code << " message=\"" << escaped(message) << "\"\n";
}

}  // namespace

int main(int argc, char** argv) {
  qcr::cli::RunConfig cfg;
  CLI::App app{"Energy, area and epsilon-conformal reparametrization of sampled disc maps"};
  app.require_subcommand(1);

  auto input = [&](CLI::App* c, const std::string& what) {
    c->add_option("-i,--input", cfg.input, what)->required()->check(CLI::ExistingFile);
  };
  auto out = [&](CLI::App* c) { c->add_option("-o,--out", cfg.out_dir, "Output directory for artifacts"); };
  auto directions = [&](CLI::App* c) {
    c->add_option("--directions", cfg.directions, "Sampled directions for polygonal targets")->check(CLI::Range(8, 4096));
  };

  for (const char* name : {"energy", "area", "defect-map", "compare-areas"}) {
    const std::string help = std::string(name) == "energy"       ? "Reshetnyak energy and per-cell density"
                             : std::string(name) == "area"       ? "Intrinsic and Hausdorff areas with per-cell Jacobians"
                             : std::string(name) == "defect-map" ? "Isotropy defect of the derivative field"
                                                                 : "Hausdorff versus intrinsic area";
    auto* c = app.add_subcommand(name, help);
    input(c, "Sampled map (text)");
    out(c);
    directions(c);
  }

  auto* ids = app.add_subcommand("identities", "Distortion and composition identity suites on random linear maps");
  ids->add_option("--count", cfg.count, "Number of random maps")->check(CLI::Range(1, 100000000));
  ids->add_option("--seed", cfg.seed, "Random seed");

  auto* solve = app.add_subcommand("solve", "Solve the Beltrami equation for a coefficient grid");
  input(solve, "Complex coefficient grid (binary)");
  out(solve);
  solve->add_option("--res-tol", cfg.res_tol, "Residual tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-iter", cfg.max_iter, "Neumann iteration cap")->check(CLI::Range(1, 100000));

  auto* rep = app.add_subcommand("reparam", "Epsilon-conformal reparametrization with a certified report");
  input(rep, "Sampled map (text)");
  out(rep);
  directions(rep);
  rep->add_option("-e,--epsilon", cfg.epsilon, "Energy excess over the area")->required();
  rep->add_option("--grid", cfg.grid, "Solver grid resolution (power of two, default twice the map resolution)");
  rep->add_option("--report", cfg.report, "Report path (default <out>/report.txt)");
  rep->add_option("--seed", cfg.seed, "Audit sampling seed");
  rep->add_option("--res-tol", cfg.res_tol, "Solver residual tolerance")->check(CLI::PositiveNumber);
  rep->add_option("--inv-tol", cfg.inv_tol, "Inversion tolerance")->check(CLI::PositiveNumber);
  rep->add_option("--audit-tol", cfg.audit_tol, "Pointwise audit tolerance")->check(CLI::NonNegativeNumber);
  rep->add_option("--audit-samples", cfg.audit_samples, "Pointwise audit samples")->check(CLI::Range(0, 10000000));
  rep->add_option("--quad-budget", cfg.quad_budget_rel, "Relative quadrature budget")->check(CLI::NonNegativeNumber);

  auto* fix = app.add_subcommand("fixture", "Write a canonical fixture");
  fix->add_option("name", cfg.fixture, "identity | stretch | linf-identity | diffeo | graph | bump")->required();
  fix->add_option("-o,--output", cfg.input, "Output file")->required();
  fix->add_option("--grid", cfg.grid, "Resolution (default 256 for maps, 512 for bump)");
  fix->add_option("--seed", cfg.seed, "Seed for random fixtures");
  fix->add_option("--k", cfg.k, "Bump coefficient height")->check(CLI::Range(0.0, 0.999));
  fix->add_option("--radius", cfg.radius, "Bump support radius")->check(CLI::Range(0.01, 0.999));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("InputError", e.what());
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    return qcr::cli::run(cfg);
  } catch (const qcr::BudgetExceeded& e) {
    error_record(qcr::to_string(e.code()), std::string(e.what()) + "; partial report written");
    return exit_code(e.code());
  } catch (const qcr::Error& e) {
    error_record(qcr::to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    error_record("InternalError", e.what());
    return 3;
  }
}
