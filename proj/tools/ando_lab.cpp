#include "ando/cli.hpp"

int main(int argc, char** argv) { return ando::cli::run(argc, argv); }
