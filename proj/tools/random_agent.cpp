// Minimal external agent: answers every observation with a random action.
// Usage: random_agent [seed]
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>

#include "json.hpp"

int main(int argc, char** argv) {
  std::mt19937_64 rng(argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0);
  std::string line;
  while (std::getline(std::cin, line)) {
    const auto msg = nlohmann::json::parse(line, nullptr, false);
    if (msg.is_discarded()) return 1;
    const std::string type = msg.value("type", "");
    if (type == "hello") {
      std::cout << R"({"type":"hello","version":1,"name":"random_agent"})" << std::endl;
    } else if (type == "observation" && !msg.value("done", false)) {
      std::cout << nlohmann::json{{"type", "action"}, {"action", static_cast<int>(rng() % 9)}}.dump()
                << std::endl;
    } else if (type == "bye") {
      return 0;
    }
  }
  return 0;
}
