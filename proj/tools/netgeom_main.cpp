#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "netgeom/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Classify orthogonal nets, product structures and Codazzi tensors of a metric given by a manifest."};
  std::string manifest_path, command, format = "text";
  std::optional<double> tolerance;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  bool timing = false;

  app.add_option("--manifest", manifest_path, "Manifest JSON file")->check(CLI::ExistingFile);
  app.add_option("--command", command, "classify | verify-product | factorize | codazzi | selftest")
      ->required()
      ->check(CLI::IsMember(netgeom::command_names()));
  app.add_option("--tolerance", tolerance, "Residual tolerance (default 1e-8 or the manifest value)");
  app.add_option("--samples", samples, "Random interior sample points (default 16)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed for sampling and the self-test battery");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--timing", timing, "Report wall-clock time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::optional<netgeom::Manifest> manifest;
    if (!manifest_path.empty()) manifest = netgeom::load_manifest(manifest_path);
    const netgeom::Report report = netgeom::run(
        command, manifest ? &*manifest : nullptr, {tolerance, samples, seed, timing});
    std::cout << netgeom::emit(report, netgeom::parse_format(format));
    return report.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
