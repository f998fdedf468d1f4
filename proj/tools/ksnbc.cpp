#include "ksnbc/harness.hpp"

int main(int argc, char** argv) { return ksnbc::harness::cli(argc, argv); }
