#include "baskets/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "baskets/errors.hpp"

namespace baskets {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

} // namespace

std::vector<BasketData> ingest_trial_data(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input: missing header");

    const std::vector<std::string> expected = {"basket_id", "patient_id",
                                               "assessment_index", "state"};
    auto header = split_csv(line);
    for (const auto& col : expected) {
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw DataError("missing column '" + col + "' in header");
    }
    std::size_t idx_basket = std::find(header.begin(), header.end(), expected[0]) - header.begin();
    std::size_t idx_patient = std::find(header.begin(), header.end(), expected[1]) - header.begin();
    std::size_t idx_index = std::find(header.begin(), header.end(), expected[2]) - header.begin();
    std::size_t idx_state = std::find(header.begin(), header.end(), expected[3]) - header.begin();

    // (basket, patient) -> assessment_index -> state, insertion order kept.
    std::vector<std::string> basket_order;
    std::map<std::string, std::vector<std::string>> patient_order;
    std::map<std::pair<std::string, std::string>, std::map<int, ResponseState>> assessments;

    int row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() < header.size())
            throw DataError("row " + std::to_string(row_number) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));

        const std::string& basket_id = fields[idx_basket];
        const std::string& patient_id = fields[idx_patient];
        if (basket_id.empty() || patient_id.empty())
            throw DataError("row " + std::to_string(row_number) + ": empty basket_id or patient_id");

        int index = 0;
        try {
            std::size_t pos = 0;
            index = std::stoi(fields[idx_index], &pos);
            if (pos != fields[idx_index].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw DataError("row " + std::to_string(row_number) +
                            ": assessment_index '" + fields[idx_index] + "' is not an integer");
        }
        if (index < 1)
            throw DataError("row " + std::to_string(row_number) +
                            ": assessment_index must be >= 1");

        auto state = parse_state(fields[idx_state]);
        if (!state)
            throw DataError("row " + std::to_string(row_number) + ": unknown state '" +
                            fields[idx_state] + "' (expected CR/PR/SD/PD)");

        if (assessments.find({basket_id, patient_id}) == assessments.end()) {
            if (patient_order.find(basket_id) == patient_order.end())
                basket_order.push_back(basket_id);
            patient_order[basket_id].push_back(patient_id);
        }
        auto& per_patient = assessments[{basket_id, patient_id}];
        if (!per_patient.emplace(index, *state).second)
            throw DataError("patient '" + patient_id + "' in basket '" + basket_id +
                            "': duplicate assessment_index " + std::to_string(index));
    }

    std::vector<BasketData> baskets;
    for (const auto& basket_id : basket_order) {
        BasketData basket;
        basket.basket_id = basket_id;
        for (const auto& patient_id : patient_order[basket_id]) {
            const auto& per_patient = assessments[{basket_id, patient_id}];
            Trajectory traj;
            traj.patient_id = patient_id;
            int expected_index = 1;
            for (const auto& [index, state] : per_patient) {
                if (index != expected_index)
                    throw DataError("patient '" + patient_id + "' in basket '" + basket_id +
                                    "': assessment_index gap, expected " +
                                    std::to_string(expected_index) + " but found " +
                                    std::to_string(index));
                traj.states.push_back(state);
                ++expected_index;
            }
            basket.patients.push_back(std::move(traj));
        }
        baskets.push_back(std::move(basket));
    }
    if (baskets.empty()) throw DataError("input contains no data rows");
    return baskets;
}

std::vector<BasketData> ingest_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path + "'");
    return ingest_trial_data(in);
}

std::string to_csv(const std::vector<BasketData>& baskets) {
    std::string out = "basket_id,patient_id,assessment_index,state\n";
    for (const auto& basket : baskets) {
        for (const auto& patient : basket.patients) {
            for (std::size_t l = 0; l < patient.states.size(); ++l) {
                out += basket.basket_id;
                out += ',';
                out += patient.patient_id;
                out += ',';
                out += std::to_string(l + 1);
                out += ',';
                out += to_string(patient.states[l]);
                out += '\n';
            }
        }
    }
    return out;
}

} // namespace baskets
