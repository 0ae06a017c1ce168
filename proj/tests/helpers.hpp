#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <endmenger/presentation.hpp>

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline endmenger::Presentation load_fixture(const std::string& name) {
    return endmenger::parse_instance(read_file(std::string(EM_FIXTURE_DIR) + "/" + name + ".red"));
}
