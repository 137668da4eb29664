#include "simpdel/cli.hpp"

int main(int argc, char** argv) { return simpdel::cli::dispatch(argc, argv); }
