#include <iostream>

#include "msgkit/cli.hpp"

int main(int argc, char** argv) {
  return msgkit::cli::run(argc, argv, std::cout, std::cerr);
}
