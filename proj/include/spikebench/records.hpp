#pragma once

#include <string>
#include <vector>

#include "spikebench/harness.hpp"

namespace spikebench {

inline constexpr const char* kCsvHeader = "estimator,lambda_star,lambda,metric,value,stderr,n,m,trials,seed";

std::string records_to_csv(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> parse_csv(const std::string& text);
std::string records_to_svg(const std::vector<ResultRecord>& records);

// Throw IoError on an unwritable path; empty input is rejected before any file is created.
void emit_csv(const std::vector<ResultRecord>& records, const std::string& path);
void emit_svg(const std::vector<ResultRecord>& records, const std::string& path);

}  // namespace spikebench
