#include "aflx/cli.hpp"

int main(int argc, char** argv) {
  return aflx::cli_main(argc, const_cast<const char* const*>(argv));
}
