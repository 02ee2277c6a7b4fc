#pragma once

#include <string>

namespace citefid {

// Provenance of a model-derived value (scorer or classifier).
struct ModelId {
    std::string name;
    std::string version;

    bool operator==(const ModelId&) const = default;
};

}  // namespace citefid
