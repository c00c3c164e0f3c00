#include "dpre/cli.hpp"

int main(int argc, char** argv) { return dpre::cli::run(argc, argv); }
