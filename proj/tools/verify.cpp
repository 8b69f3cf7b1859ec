#include "ofa/cli.hpp"

int main(int argc, char** argv) { return ofa::verify_main(argc, argv); }
