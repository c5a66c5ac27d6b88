#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace relay_osc::testing {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with args, capturing stdout and stderr through files under tag.
inline CliRun run_cli(const std::string& args, const std::string& tag) {
  const std::string base = std::string(RELAY_OSC_TEST_TMP) + "/cli_" + tag;
  const std::string cmd = std::string("\"") + RELAY_OSC_CLI_PATH + "\" " + args + " >\"" + base +
                          ".out\" 2>\"" + base + ".err\"";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(base + ".out");
  r.err = read_file(base + ".err");
  return r;
}

inline std::string tmp_path(const std::string& name) {
  return std::string(RELAY_OSC_TEST_TMP) + "/" + name;
}

}  // namespace relay_osc::testing
