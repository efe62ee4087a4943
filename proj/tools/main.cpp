#include "cli_app.hpp"

int main(int argc, char** argv) { return ipdd::cli_main(argc, argv); }
