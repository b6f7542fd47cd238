#include "punct/cli.h"

int main(int argc, char** argv) { return punct::cli::dispatch(argc, argv); }
