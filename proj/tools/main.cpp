#include "cli.hpp"

int main(int argc, char** argv) { return rwrs::cli::run(argc, argv); }
