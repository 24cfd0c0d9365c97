// Command-line entry point.  Commands are implemented in the library so the
// test suite can drive them directly; this file only parses arguments.
#include <cstdio>

int main(int, char**) {
  std::puts("repgame: commands not wired up yet");
  return 4;
}
