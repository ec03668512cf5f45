#include "oc/cli.hpp"

int main(int argc, char** argv) { return oc::cli::dispatch(argc, argv); }
