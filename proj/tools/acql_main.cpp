#include "acql/cli.hpp"

int main(int argc, char** argv) { return acql::cli::run(argc, argv); }
