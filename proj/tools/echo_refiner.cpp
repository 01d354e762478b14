// Refiner that returns the draft unchanged.
#include <iostream>
#include <string>

int main() {
    std::string section, line;
    std::cout << "### FORMALIZATION\n";
    while (std::getline(std::cin, line)) {
        if (line.rfind("### ", 0) == 0) {
            section = line.substr(4);
            continue;
        }
        if (section == "FORMALIZATION") std::cout << line << "\n";
    }
    return 0;
}
