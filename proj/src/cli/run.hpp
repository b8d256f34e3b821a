#pragma once

namespace wavebound::cli {

// Entry point of the wavebound executable; returns the process exit code.
int run(int argc, char** argv);

}  // namespace wavebound::cli
