#include "relgrow/cli.hpp"

int main(int argc, char** argv) { return relgrow::cli::run(argc, argv); }
