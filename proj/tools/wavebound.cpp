#include "cli/run.hpp"

int main(int argc, char** argv) { return wavebound::cli::run(argc, argv); }
