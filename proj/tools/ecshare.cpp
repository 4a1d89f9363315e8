#include "cli.hpp"

int main(int argc, char** argv) { return ecshare::cli::run(argc, argv); }
