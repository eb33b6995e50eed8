#pragma once

#include <stdexcept>
#include <string>

namespace susco {

struct NoRoute : std::runtime_error {
    explicit NoRoute(const std::string& what) : std::runtime_error(what) {}
};

struct SplitMismatch : std::runtime_error {
    explicit SplitMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct UtilityUndefined : std::runtime_error {
    explicit UtilityUndefined(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidConfig : std::runtime_error {
    explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

struct SaturatedLink : std::runtime_error {
    explicit SaturatedLink(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace susco
