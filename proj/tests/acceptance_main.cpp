// Acceptance gate: runs every verification criterion at its pinned threshold
// and exits nonzero if any line fails.  Invoked by ctest with --out pointing
// into the build tree.

#include "osc/accept.hpp"

int main(int argc, char** argv) { return osc::accept::acceptance_main(argc, argv); }
