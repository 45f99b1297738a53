#include "ptlearn/cli.hpp"

int main(int argc, char** argv) { return ptlearn::cli::run(argc, argv); }
