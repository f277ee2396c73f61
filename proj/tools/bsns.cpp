#include <bsns/cli.hpp>

int main(int argc, char** argv) { return bsns::cli::run(argc, argv); }
