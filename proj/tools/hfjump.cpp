#include "hfjump/cli.hpp"

int main(int argc, char** argv) { return hfjump::cli::run(argc, argv); }
