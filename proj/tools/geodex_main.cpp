#include <cstdio>

int main() {
    std::puts("geodex: scenario runner not wired up yet");
    return 1;
}
