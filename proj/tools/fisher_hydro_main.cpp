#include "fisher_hydro/cli/run.hpp"

int main(int argc, char** argv) { return fisher_hydro::cli::cli_main(argc, argv); }
