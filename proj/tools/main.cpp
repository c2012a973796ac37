// bbmlab: command line front end of the collision lab
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

struct Exit {
  enum : int { pass = 0, fail = 1, usage = 2 };
};

std::string all_keys_footer() {
  std::vector<const bbmcli::KeySpec*> keys;
  for (auto& k : bbmcli::key_registry()) keys.push_back(&k);
  return "\nConfig keys (set in a --config file, with --set key=value, or by the flag in brackets):\n" +
         bbmcli::describe_keys(keys) +
         "\nConfig files: key = value lines under [section] headers ('#' comments), or JSON\n"
         "({\"collide\": {\"c2\": 1.05}} or {\"collide.c2\": 1.05}). Unknown keys are errors.\n"
         "Exit codes: 0 all checks pass, 1 a check failed, 2 usage error.\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for two-soliton collisions of the BBM equation", "bbmlab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(all_keys_footer());
  app.set_version_flag("--version", std::string(bbm::library_version()) + " (" + bbm::version_hash() + ")");

  std::string config_file, out_dir;
  std::vector<std::string> sets;
  bool as_json = false;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", config_file, "config file (key=value with sections, or .json)")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override one key, e.g. --set collide.c2=1.05 (repeatable)");
  app.add_flag("--json", as_json, "print the JSON report instead of the text summary");
  app.add_option("--out", out_dir, "write <command>.json and <command>.csv into this directory");
  app.add_option("--jobs", jobs, "upper bound on worker threads")->check(CLI::PositiveNumber);

  // flag values per command, applied after the file and --set
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::map<std::string, bool>> bool_values;
  std::map<std::string, CLI::App*> subs;
  for (auto& info : bbmcli::commands()) {
    CLI::App* sub = app.add_subcommand(info.name, info.summary);
    subs[info.name] = sub;
    auto keys = bbmcli::keys_for(info.sections);
    sub->footer("\nConfig keys read by " + info.name + ":\n" + bbmcli::describe_keys(keys));
    for (auto* k : keys) {
      if (k->kind == bbmcli::KeyKind::boolean) {
        sub->add_flag(k->flag, bool_values[info.name][k->key], k->help + " (" + k->key + ")");
      } else {
        sub->add_option(k->flag, flag_values[info.name][k->key], k->help + " (" + k->key + ")");
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Exit::usage;
  }

  std::string command;
  for (auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  bbmcli::RunConfig cfg;
  bbmcli::Result result;
  try {
    if (!config_file.empty()) cfg.load_file(config_file);
    for (auto& s : sets) cfg.set_assignment(s);
    CLI::App* sub = subs.at(command);
    for (auto& [key, value] : flag_values[command])
      if (sub->count(bbmcli::find_key(key)->flag) > 0) cfg.set(key, value);
    for (auto& [key, value] : bool_values[command])
      if (sub->count(bbmcli::find_key(key)->flag) > 0) cfg.set(key, value ? "true" : "false");
    result = bbmcli::run_command(command, cfg, jobs);
  } catch (const bbmcli::UsageError& e) {
    std::cerr << "bbmlab " << command << ": " << e.what() << "\n";
    return Exit::usage;
  } catch (const std::exception& e) {
    std::cerr << "bbmlab " << command << ": " << e.what() << "\n";
    return Exit::fail;
  }

  const auto doc = bbmcli::envelope(command, cfg, result);
  if (as_json)
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << result.text << (result.pass ? "PASS" : "FAIL") << "\n";

  if (!out_dir.empty()) {
    try {
      std::filesystem::create_directories(out_dir);
      const std::string stem = (std::filesystem::path(out_dir) / command).string();
      bbm::write_text_file(stem + ".json", doc.dump(2) + "\n");
      for (auto& [suffix, table] : result.tables) bbm::write_text_file(stem + suffix + ".csv", table.str());
      bbm::write_text_file(stem + ".conf", cfg.resolved_text());
    } catch (const std::exception& e) {
      std::cerr << "bbmlab " << command << ": " << e.what() << "\n";
      return Exit::fail;
    }
  }
  return result.pass ? Exit::pass : Exit::fail;
}
