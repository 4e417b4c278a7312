#include <filesystem>
#include <iostream>

#include "cli_support.hpp"
#include "emotesent/error.hpp"
#include "emotesent/parallel.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kDataError = 3;
constexpr int kInternalError = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emote-aware sentiment analysis for Twitch chat", "emotesent"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  cli::Globals globals;
  app.add_option("--seed", globals.seed, "Global random seed")->capture_default_str();
  app.add_option("--threads", globals.threads, "Worker cap (0 = all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.set_config("--config", "", "INI file of option values; command-line flags take precedence");
  app.set_version_flag("--version", std::string(emotesent::kToolVersion));

  cli::Registry registry(globals);
  cli::register_corpus(app, registry);
  cli::register_tokenize(app, registry);
  cli::register_features(app, registry);
  cli::register_train(app, registry);
  cli::register_eval(app, registry);
  cli::register_embed(app, registry);
  cli::register_pseudodict(app, registry);
  cli::register_loove(app, registry);
  cli::register_analyze(app, registry);
  cli::register_grid(app, registry);
  cli::register_verify(app, registry);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    emotesent::set_default_threads(globals.threads);
    if (!registry.run()) {
      std::cerr << app.help();
      return kUsageError;
    }
    return 0;
  } catch (const emotesent::ConfigError& e) {
    std::cerr << "emotesent: configuration error: " << e.what() << '\n';
    return kUsageError;
  } catch (const emotesent::UnsupportedError& e) {
    std::cerr << "emotesent: unsupported: " << e.what() << '\n';
    return kUsageError;
  } catch (const emotesent::Error& e) {
    std::cerr << "emotesent: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "emotesent: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "emotesent: internal error: " << e.what() << '\n';
    return kInternalError;
  }
}
