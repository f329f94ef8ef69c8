#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uat/refmachine/program.hpp"

namespace uat::refmachine {

/// Visits every valid program of encoded length <= max_len exactly once, in
/// nondecreasing length and lexicographic order within a length. The visitor
/// returns false to stop early.
void enumerate_programs(int max_len, const std::function<bool(const Program&)>& visit,
                        int alphabet = kDefaultAlphabet);

/// Collects enumerate_programs into a vector. Intended for small max_len.
std::vector<Program> enumerate_program_list(int max_len, int alphabet = kDefaultAlphabet);

/// Number of valid programs of exactly `length` code symbols, computed by a
/// counting recurrence over the instruction table (no enumeration).
std::uint64_t count_programs(int length, int alphabet = kDefaultAlphabet);

}  // namespace uat::refmachine
