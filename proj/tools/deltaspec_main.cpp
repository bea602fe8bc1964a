#include <iostream>

int main() {
    std::cout << "deltaspec: not wired up yet\n";
    return 0;
}
