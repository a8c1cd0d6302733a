#include "frameflow/cli.hpp"

int main(int argc, char** argv) { return frameflow::run_cli(argc, argv); }
