#include "qsylv/cli.hpp"

int main(int argc, char** argv) { return qsylv::cli::run(argc, argv); }
