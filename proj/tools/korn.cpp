#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "korn/cli.hpp"
#include "korn/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted Korn and Poincare-Korn inequality laboratory"};
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "configuration JSON")->required()->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "output directory (default: the config's \"out\" or .)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for the random field sweeps");
  app.add_flag("--quiet", quiet, "print nothing on success");
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    korn::RunConfig config = korn::parse_config(nlohmann::json::parse(in));
    if (*out_opt) config.out_dir = out_dir;
    if (*seed_opt) config.seed = seed;
    config.quiet = quiet;

    const korn::RunOutcome outcome = korn::run(config);
    korn::write_outputs(outcome, config.out_dir);
    if (!quiet || !outcome.all_ok) {
      for (const auto& f : outcome.failures) std::cerr << "FAIL " << f << '\n';
      std::cout << (outcome.all_ok ? "all checks hold" : "some checks failed") << "; report written to "
                << (config.out_dir / "report.json").string() << '\n';
    }
    return outcome.all_ok ? 0 : 1;
  } catch (const korn::Error& e) {
    std::cerr << "error [" << e.module() << "/" << e.stage() << "]: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [cli/config]: " << e.what() << '\n';
    return 2;
  }
}
