#include <islm/cli.hpp>

int main(int argc, char** argv) { return islm::cli::run_command(argc, argv); }
