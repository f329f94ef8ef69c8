#pragma once

#include <string>

#include "uat/interface/config.hpp"
#include "uat/taskgen/task_class.hpp"

namespace uat::test {

inline std::string bank_path() { return std::string(UAT_DATA_DIR) + "/bank.tsv"; }

inline const taskgen::Bank& bank() {
  static const taskgen::Bank b = taskgen::load_bank(bank_path());
  return b;
}

/// The two easiest strata of the bank: cheap to predict, so fine for unit tests.
inline const taskgen::TaskClass& easy_class() {
  static const taskgen::TaskClass cls = [] {
    const auto& full = bank().tasks;
    std::vector<taskgen::Task> tasks;
    for (int s = 0; s < 2; ++s) {
      for (auto i : full.stratum(s)) tasks.push_back(full.task(i));
    }
    return taskgen::TaskClass(tasks, {full.band_edges()[0], full.band_edges()[1], full.band_edges()[2]});
  }();
  return cls;
}

inline const taskgen::Bank& easy_bank() {
  static const taskgen::Bank b{easy_class(), bank().budget};
  return b;
}

/// Two time levels crossed with four channels, raw codec.
inline interface::ConfigurationSpace eight_configs() {
  return interface::ConfigurationSpace::grid({{1, 1}, {2, 2}},
                                             {{26, "raw", 0}, {26, "raw", 1}, {26, "raw", 2}, {26, "raw", 3}});
}

}  // namespace uat::test
