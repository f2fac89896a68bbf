#include "relaxkit/cli.hpp"

int main(int argc, char** argv) { return relaxkit::run_cli(argc, argv); }
