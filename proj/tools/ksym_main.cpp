#include "ksym/cli.hpp"

int main(int argc, char** argv) { return ksym::run(argc, argv); }
