#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "metais/config.hpp"
#include "metais/log.hpp"
#include "metais/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Failure probability estimation with a kriging-based importance sampling scheme"};
  std::string config_path, method, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> target_cov;
  std::optional<std::size_t> max_evals, k_per_iter;
  bool parallel = false, quiet = false;

  app.add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed");
  app.add_option("--method", method, "mc, is or metais")->check(CLI::IsMember({"mc", "is", "metais"}));
  app.add_option("--target-cov", target_cov, "target coefficient of variation");
  app.add_option("--max-evals", max_evals, "limit-state evaluation budget");
  app.add_option("--k-per-iter", k_per_iter, "points added per refinement iteration");
  app.add_option("--out", out, "report path (default: config output, else stdout)");
  app.add_flag("--parallel-phases", parallel, "estimate the two factors concurrently");
  app.add_flag("-q,--quiet", quiet, "no progress lines on stderr");
  CLI11_PARSE(app, argc, argv);

  try {
    metais::RunConfig config = metais::load_config(config_path);
    if (seed) config.seed = *seed;
    if (!method.empty()) config.method = metais::parse_method(method);
    if (target_cov) config.target_cov = *target_cov;
    if (max_evals) config.n_max = *max_evals;
    if (k_per_iter) config.k_per_iter = *k_per_iter;
    if (!out.empty()) config.output = out;
    if (parallel) config.parallel_phases = true;
    metais::validate(config);

    if (!quiet) metais::log::set_sink([](const std::string& line) { std::cerr << line << '\n'; });
    const metais::RunReport report = metais::run(config);
    const std::string text = metais::dump_json(report.to_json()) + "\n";
    if (config.output.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(config.output);
      if (!f) throw metais::Error("cannot write " + config.output);
      f << text;
    }
  } catch (const metais::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
