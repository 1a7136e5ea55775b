#include "qasym/cli.hpp"

int main(int argc, char** argv) { return qasym::cli_main(argc, argv); }
