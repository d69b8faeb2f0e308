#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "baskets/response.hpp"

namespace baskets {

// Reads the flat assessment table:
//   basket_id,patient_id,assessment_index,state
// assessment_index is 1-based and must form a contiguous run 1..t per
// patient; state is one of CR/PR/SD/PD (case-insensitive). Baskets and
// patients keep their first-appearance order. Throws DataError with row
// context on any violation.
std::vector<BasketData> ingest_trial_data(std::istream& in);

std::vector<BasketData> ingest_csv_file(const std::string& path);

// Canonical serialization of a dataset back to the ingestion format.
std::string to_csv(const std::vector<BasketData>& baskets);

} // namespace baskets
