#include "cli.hpp"

int main(int argc, char** argv) { return xfode::cli::run(argc, argv); }
