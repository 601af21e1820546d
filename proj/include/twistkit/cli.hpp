#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace twk {

// Runs one command line (arguments without the program name) and writes the
// verb output to out, diagnostics to err. Returns the process exit status:
// 0 on success, 1 when a verification fails, 2 on usage or input errors.
//
// Verbs: cohomology | verify | deligne | chern | anomaly | pair |
//        pushforward | eta
// Global flags --seed, --format {table,csv} and --max-coeff-degree are also
// readable from TWISTKIT_SEED, TWISTKIT_FORMAT and TWISTKIT_MAX_COEFF_DEGREE.
// Bare data names resolve under $TWISTKIT_DATA_DIR (default "data").
int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace twk
