#include "cdtopo/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "cdtopo/benchmarks.hpp"
#include "cdtopo/cdt.hpp"
#include "cdtopo/error.hpp"
#include "cdtopo/metrics.hpp"
#include "cdtopo/output.hpp"
#include "cdtopo/simp.hpp"

namespace cdtopo {

namespace {

struct RunOptions {
  std::string problem;
  std::string method = "cdt";
  int nx = 180;
  int ny = 60;
  double volfrac = 0.6;
  double beta = 100.0;
  double mu = 0.975;
  double penal = 3.0;
  double rmin = 1.5;
  std::string out_dir = ".";
  int log_every = 0;
  std::string dump_inner;
};

int run_benchmark(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const Problem problem = make_problem(opt.problem, opt.nx, opt.ny, opt.volfrac);
  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);
  const std::string stem = opt.problem + "_" + opt.method;

  auto log_outer = [&](const IterationRecord& rec) {
    if (opt.log_every > 0 && rec.iter % opt.log_every == 0) {
      err << std::setprecision(10) << opt.method << " it " << rec.iter << " C=" << rec.compliance
          << " vol=" << rec.volume << " target=" << rec.budget << " gray=" << rec.grayness;
      if (opt.method == "cdt") {
        err << " inner=" << rec.inner_iterations << " beta=" << rec.beta
            << (rec.rounded ? " rounded" : "");
      } else {
        err << " change=" << rec.change;
      }
      err << '\n';
    }
  };

  RunResult result;
  if (opt.method == "cdt") {
    CDTConfig config;
    config.inner.beta = opt.beta;
    config.mu = opt.mu;
    CDTObservers observers;
    observers.outer = [&](const OuterTrace& t) { log_outer(t.record); };
    std::ofstream dump;
    if (!opt.dump_inner.empty()) {
      dump.open(opt.dump_inner);
      if (!dump) throw IoError("cannot open '" + opt.dump_inner + "' for writing");
      dump << "outer,inner,varsigma,sigma_min,sigma_max,cost,volume,gap,rho_min,rho_max\n";
      observers.inner = [&](int outer, const InnerTrace& t) {
        dump << outer << ',' << t.iteration << ',' << format_double(t.dual.varsigma) << ','
             << format_double(t.dual.sigma.minCoeff()) << ','
             << format_double(t.dual.sigma.maxCoeff()) << ',' << format_double(t.cost) << ','
             << format_double(t.volume) << ',' << format_double(t.gap) << ','
             << format_double(t.rho.minCoeff()) << ',' << format_double(t.rho.maxCoeff()) << '\n';
      };
    }
    result = run_cdt(problem, config, observers);
  } else {
    SIMPConfig config;
    config.penal = opt.penal;
    config.rmin = opt.rmin;
    result = run_simp(problem, config, log_outer);
  }

  write_density_image(result.final_rho, problem.mesh, (dir / (stem + "_density.pgm")).string());
  write_density_csv(result.final_rho, problem.mesh, (dir / (stem + "_density.csv")).string());
  write_history_csv(result, (dir / (stem + "_history.csv")).string());

  out << opt.method << ' ' << opt.problem << ' ' << opt.nx << ' ' << opt.ny << ' '
      << format_double(result.final_compliance()) << ' ' << result.outer_iterations << ' '
      << format_double(grayness_metric(result.final_rho)) << ' '
      << format_double(checkerboard_metric(problem.mesh, result.final_rho)) << '\n';
  return result.converged ? 0 : 2;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology optimization benchmarks: canonical-dual (cdt) and SIMP", "cdtopo"};
  app.require_subcommand(1);

  RunOptions opt;
  CLI::App* run = app.add_subcommand("run", "Optimize one benchmark problem");
  run->option_defaults()->always_capture_default();
  run->add_option("--problem", opt.problem, "Benchmark problem")
      ->required()
      ->check(CLI::IsMember({"mbb", "cantilever"}));
  run->add_option("--method", opt.method, "Optimizer")->check(CLI::IsMember({"cdt", "simp"}));
  run->add_option("--nx", opt.nx, "Elements along x")->check(CLI::PositiveNumber);
  run->add_option("--ny", opt.ny, "Elements along y")->check(CLI::PositiveNumber);
  run->add_option("--volfrac", opt.volfrac, "Target volume fraction")
      ->check(CLI::Range(0.0, 1.0));
  run->add_option("--beta", opt.beta, "CDT perturbation parameter")->check(CLI::PositiveNumber);
  run->add_option("--mu", opt.mu, "CDT volume shrink factor")->check(CLI::Range(0.0, 1.0));
  run->add_option("--penal", opt.penal, "SIMP penalization")->check(CLI::Range(1.0, 100.0));
  run->add_option("--rmin", opt.rmin, "SIMP filter radius (0 disables)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--out", opt.out_dir, "Output directory");
  run->add_option("--log-every", opt.log_every, "Log every K outer iterations to stderr (0 = off)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--dump-inner", opt.dump_inner, "CSV dump of every CDT inner iteration");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    return run_benchmark(opt, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cdtopo
