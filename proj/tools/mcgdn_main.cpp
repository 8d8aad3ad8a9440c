#include "mcgdn/commands.hpp"

int main(int argc, char **argv) { return mcgdn::cli::run(argc, argv); }
