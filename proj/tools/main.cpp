#include "cli.hpp"

int main(int argc, char** argv) { return cwsk::cli::run(argc, argv); }
