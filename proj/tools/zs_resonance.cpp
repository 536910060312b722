#include "zsres/commands.hpp"

int main(int argc, char** argv) { return zsres::run_cli(argc, argv); }
