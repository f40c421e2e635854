#include "ctql/cli.hpp"

int main(int argc, char** argv) { return ctql::cli::run(argc, argv); }
