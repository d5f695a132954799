// Prints one PASS/FAIL line per acceptance criterion. Arguments select
// criterion ids; with none, all twelve run. Exit status is the failure count.
#include <iostream>
#include <string>
#include <vector>

#include "mped/selftest.hpp"

int main(int argc, char **argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::stoi(argv[i]));
    return mped::selftest::run_all(std::cout, ids);
}
