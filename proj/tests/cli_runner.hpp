#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef RENN_CLI_PATH
#error "RENN_CLI_PATH must name the renn executable"
#endif

namespace renn::test {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr together
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline CliResult run_cli(const std::string& args, const std::string& capture_path) {
    const std::string cmd = std::string("\"") + RENN_CLI_PATH + "\" " + args + " > \"" + capture_path + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(capture_path);
    return r;
}

}  // namespace renn::test
