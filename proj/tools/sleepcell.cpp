#include <cstdio>
int main() { std::puts("sleepcell placeholder"); return 0; }
