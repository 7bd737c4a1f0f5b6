#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cbpv/parse.hpp"
#include "cbpv/term.hpp"

namespace testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline cbpv::TermPtr fixture(const std::string& name) {
  return cbpv::parse_source(read_file(std::string(FIXTURE_DIR) + "/" + name + ".cbpv"));
}

inline cbpv::TermPtr T(const std::string& src) { return cbpv::parse_source(src); }

inline const char* const kFixtures[] = {"f1", "f2", "f3", "f4", "f5", "f5_prime", "f6",
                                        "f7", "f8", "f9a", "f9b", "f10"};

}  // namespace testing
