#include "akim/cli.hpp"

int main(int argc, char** argv) { return akim::cli::dispatch(argc, argv); }
