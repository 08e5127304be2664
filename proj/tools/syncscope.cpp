#include "syncscope/cli.hpp"

int main(int argc, char** argv) { return syncscope::run(argc, argv); }
