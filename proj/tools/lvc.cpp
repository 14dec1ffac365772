#include "lvc/app.hpp"

int main(int argc, char** argv) { return lvc::cli_main(argc, argv); }
