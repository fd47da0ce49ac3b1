#include "sipseg/cli.hpp"

int main(int argc, char** argv) {
  return sipseg::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
