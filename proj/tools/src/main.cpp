#include <iostream>

#include "khintype/cli/app.hpp"

int main(int argc, char** argv) { return khintype::cli::run(argc, argv, std::cout, std::cerr); }
