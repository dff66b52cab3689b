#include "renorm/cli.hpp"
#include "renorm/errors.hpp"
#include "renorm/parallel.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Renormalization experiments for parabolic flows on the torus"};
  app.require_subcommand(1);

  std::string config_path, out_dir, report_dir;
  int threads = 0;
  auto* run = app.add_subcommand("run", "run the experiment named in a config");
  run->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "artifact directory (overrides the config)");
  run->add_option("--threads", threads, "worker threads; RENORM_LAB_THREADS is the fallback");

  auto* rep = app.add_subcommand("report", "summarize an artifact directory");
  rep->add_option("dir", report_dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (threads <= 0)
        if (const char* env = std::getenv("RENORM_LAB_THREADS")) threads = std::atoi(env);
      renorm::set_thread_count(threads > 0 ? threads : 0);
      auto cfg = renorm::cli::load_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      const int status = renorm::cli::run(cfg);
      std::cout << renorm::cli::report(cfg.out_dir);
      return status;
    }
    std::cout << renorm::cli::report(report_dir);
    return 0;
  } catch (const renorm::Error& e) {
    std::cerr << "renorm-lab: " << e.what() << "\n";
    return 2;
  }
}
