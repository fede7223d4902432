#include "limelens/harness.hpp"

int main(int argc, char** argv) { return limelens::cli_main(argc, argv); }
