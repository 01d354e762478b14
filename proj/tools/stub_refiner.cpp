// Scripted refiner: drops the fact named in the feedback that appears last in the draft.
#include "geodeduce/formal_lang.hpp"

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

// `needle` occurs in `hay` as a whole literal, not nested inside a larger one.
bool names(const std::string& hay, const std::string& needle) {
    for (size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) {
        bool left = p == 0 || hay[p - 1] == ' ';
        size_t e = p + needle.size();
        bool right = e == hay.size() || (hay[e] != ')' && hay[e] != ',');
        if (left && right) return true;
    }
    return false;
}

}  // namespace

int main() {
    std::vector<std::string> draft, errors;
    std::string section, line;
    while (std::getline(std::cin, line)) {
        if (line.rfind("### ", 0) == 0) {
            section = line.substr(4);
            continue;
        }
        if (section == "FORMALIZATION") draft.push_back(line);
        if (section == "FEEDBACK" && line.rfind("ERROR: ", 0) == 0) errors.push_back(line);
    }
    int drop = -1;
    for (size_t i = 0; i < draft.size(); ++i) {
        std::string canon;
        try {
            canon = gd::parse_literal(draft[i]).str();
        } catch (const std::exception&) {
            continue;
        }
        for (const auto& e : errors)
            if (names(e, canon)) drop = static_cast<int>(i);
    }
    std::cout << "### FORMALIZATION\n";
    for (size_t i = 0; i < draft.size(); ++i)
        if (static_cast<int>(i) != drop) std::cout << draft[i] << "\n";
    return 0;
}
