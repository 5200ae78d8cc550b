#pragma once

// Non-quantum transition systems for cross-checking the bisimulation
// checker against the reference in oracle.hpp.

#include <string>
#include <vector>

#include "cqp/sem/lts.hpp"
#include "oracle.hpp"

namespace classical {

struct Case {
    std::string name;
    oracle::PlainLts lts;
    std::size_t left = 0;
    std::size_t right = 0;
    bool expected = false;  // textbook answer for (left, right)
};

std::vector<Case> suite();

// Same graph as a sem::Lts: visible actions become inputs without
// payload on a channel named after the action.
cqp::sem::Lts to_lts(const oracle::PlainLts &p);

}  // namespace classical
