#include "fdrcurve/cli.hpp"

int main(int argc, char** argv) { return fdrcurve::cli::run_main(argc, argv); }
