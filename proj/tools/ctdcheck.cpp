#include <iostream>
#include <string>
#include <vector>

#include "ctd/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ctd::app::run(std::move(args), std::cout, std::cerr);
}
