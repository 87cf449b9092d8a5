#include <cavity_mf/cli.hpp>

int main(int argc, char** argv) { return cavity_mf::run_cli(argc, argv); }
