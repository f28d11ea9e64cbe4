#include "evt/cli.hpp"

int main(int argc, char** argv) { return evt::cli::dispatch(argc, argv); }
