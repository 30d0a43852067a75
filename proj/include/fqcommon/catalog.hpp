#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fqcommon/linsys.hpp"

namespace fqcommon::catalog {

struct Entry {
    std::string name;
    std::string description;
    linsys::LinearSystem system;
};

const std::vector<Entry>& systems();
const linsys::LinearSystem& get(std::string_view name);
std::vector<std::string> names();

}  // namespace fqcommon::catalog
