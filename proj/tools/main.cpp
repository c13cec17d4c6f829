#include "otplan/cli.hpp"

int main(int argc, char** argv) { return otplan::run_cli(argc, argv); }
