#include "gwt/cli.hpp"

int main(int argc, char** argv) { return gwt::run_cli(argc, argv); }
