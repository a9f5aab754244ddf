#pragma once

namespace gravitree {

// Wall-clock seconds spent in each phase of one block step.
struct PhaseTimings {
    double walk_tree = 0.0;
    double calc_node = 0.0;
    double make_tree = 0.0;
    double predict = 0.0;
    double correct = 0.0;

    double total() const { return walk_tree + calc_node + make_tree + predict + correct; }

    PhaseTimings& operator+=(const PhaseTimings& o) {
        walk_tree += o.walk_tree;
        calc_node += o.calc_node;
        make_tree += o.make_tree;
        predict += o.predict;
        correct += o.correct;
        return *this;
    }
};

}  // namespace gravitree
