#pragma once

#include <stdexcept>

namespace gravitree {

// Malformed input: bad files, out-of-domain values, broken invariants.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured capacity was exhausted (frontier queue, worker slots, ...).
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact zero separation with zero softening.
class singularity_error : public data_error {
public:
    using data_error::data_error;
};

}  // namespace gravitree
