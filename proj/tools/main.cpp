#include "rebeam/cli.hpp"

int main(int argc, char** argv) { return rebeam::runCli(argc, argv); }
