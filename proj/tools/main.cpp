#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using namespace rwn;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

cli::RunConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw cli::ConfigError("cannot read " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw cli::ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return cli::parse_config(j);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac radial operator inside charged black holes"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  int jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  for (const auto& c : cli::kCommands) app.add_subcommand(c)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  cli::RunConfig config;
  cli::Table table;
  std::string failure;
  try {
    config = load_config(config_path);
    table = cli::run_command(command, config, jobs);
  } catch (const cli::ConfigError& e) {
    std::cerr << "rwn: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    failure = e.what();
    std::cerr << "rwn: numerical failure: " << failure << "\n";
    table.summary["error"] = failure;
    table.ok = {false};
  }

  try {
    fs::create_directories(out_dir);
    const fs::path base = fs::path(out_dir) / command;
    const bool csv = format == "csv";
    if (csv && failure.empty()) write_file(base.string() + ".csv", cli::to_csv(table));
    write_file(base.string() + ".envelope.json", cli::envelope(command, config, table, jobs, !csv).dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "rwn: " << e.what() << "\n";
    return 1;
  }
  std::cout << command << ": " << table.rows.size() << " rows, " << (table.all_ok() ? "ok" : "failed") << "\n";
  if (table.summary.is_object() && !table.summary.empty()) std::cout << table.summary.dump() << "\n";
  return table.all_ok() ? 0 : kExitNumerical;
}
