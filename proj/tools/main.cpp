#include "fracns/cli.hpp"

int main(int argc, char** argv) { return fracns::cli_dispatch(argc, argv); }
