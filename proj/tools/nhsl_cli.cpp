#include "nhsl/cli.hpp"

#include <cstdlib>

int main(int argc, char** argv) {
    // the worker pool parallelizes over probes; keep the BLAS single-threaded
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);
    return nhsl::cli::run_cli(argc, argv);
}
