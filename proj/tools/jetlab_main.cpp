#include "jetlab/workspace.hpp"

int main(int argc, char** argv) { return jetlab::run_cli(argc, argv); }
