#include <shadowkit/cli.hpp>

int main(int argc, char** argv) { return shadowkit::cli::main(argc, argv); }
