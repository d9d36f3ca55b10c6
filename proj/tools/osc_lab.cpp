#include "osc/runner.hpp"

int main(int argc, char** argv) { return osc::runner::run(argc, argv); }
