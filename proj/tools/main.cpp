#include "commands.hpp"

int main(int argc, char** argv) { return polarsep::cli::run(argc, argv); }
