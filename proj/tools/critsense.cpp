#include "critsense/xcli.hpp"

int main(int argc, char** argv) { return critsense::cli_main(argc, argv); }
