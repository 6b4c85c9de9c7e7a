#include "qin/cli.hpp"

int main(int argc, char** argv) { return qin::cli::run(argc, argv); }
