#include "cbctt/cli.hpp"

int main(int argc, char** argv) { return cbctt::run_cli(argc, argv); }
