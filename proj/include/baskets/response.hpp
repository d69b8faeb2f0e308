#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace baskets {

// RECIST-like tumor response categories. The index order CR=0, PR=1,
// SD=2, PD=3 is fixed and used for every vector and matrix in the toolkit.
enum class ResponseState : int { CR = 0, PR = 1, SD = 2, PD = 3 };

inline constexpr int kNumStates = 4;

const char* to_string(ResponseState s);

// Case-insensitive; returns nullopt for unknown strings.
std::optional<ResponseState> parse_state(std::string_view text);

// One patient's ordered response assessments. The first element is the
// baseline assessment; a length-1 trajectory contributes no transitions.
struct Trajectory {
    std::string patient_id;
    std::vector<ResponseState> states; // length >= 1
};

struct BasketData {
    std::string basket_id;
    std::vector<Trajectory> patients; // size >= 1, unique patient_ids
};

// True if the trajectory contains CR or PR at any assessment (baseline
// included).
bool ever_responded(const Trajectory& t);

int responder_count(const BasketData& basket);

// Observed ORR: fraction of patients that ever reached CR or PR.
double orr_estimate(const BasketData& basket);

} // namespace baskets
