#include "cverr/cli.hpp"

int main(int argc, char** argv) { return cverr::run_cli(argc, argv); }
