#include "uavnet/cli/commands.hpp"

int main(int argc, char** argv) { return uavnet::cli::run(argc, argv); }
