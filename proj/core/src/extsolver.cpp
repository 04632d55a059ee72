#include "trsat/extsolver.hpp"

#include <cstdio>
#include <sstream>

namespace trsat {

ExternalResult run_external_solver(const std::string& solver_binary, const std::string& cnf_path,
                                   int num_variables) {
    std::string cmd = solver_binary + " '" + cnf_path + "' 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw Error("external solver: cannot spawn '" + solver_binary + "'");
    std::string output;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
    int rc = pclose(pipe);

    ExternalResult res;
    res.exit_code = rc;
    Assignment a(num_variables, false);
    bool saw_values = false;
    std::istringstream in(output);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("s ", 0) == 0) {
            if (line.find("UNSATISFIABLE") != std::string::npos)
                res.status = ExternalStatus::unsatisfiable;
            else if (line.find("SATISFIABLE") != std::string::npos)
                res.status = ExternalStatus::satisfiable;
        } else if (line.rfind("v ", 0) == 0) {
            std::istringstream vs(line.substr(2));
            int lit;
            while (vs >> lit) {
                if (lit == 0) continue;
                int var = lit < 0 ? -lit : lit;
                if (var >= 1 && var <= num_variables) a[var - 1] = lit > 0;
            }
            saw_values = true;
        }
    }
    if (res.status == ExternalStatus::satisfiable && saw_values) res.assignment = a;
    return res;
}

}  // namespace trsat
