#include "baskets/response.hpp"

#include <algorithm>
#include <cctype>

#include "baskets/errors.hpp"

namespace baskets {

const char* to_string(ResponseState s) {
    switch (s) {
        case ResponseState::CR: return "CR";
        case ResponseState::PR: return "PR";
        case ResponseState::SD: return "SD";
        case ResponseState::PD: return "PD";
    }
    return "??";
}

std::optional<ResponseState> parse_state(std::string_view text) {
    std::string up;
    up.reserve(text.size());
    for (char c : text) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (up == "CR") return ResponseState::CR;
    if (up == "PR") return ResponseState::PR;
    if (up == "SD") return ResponseState::SD;
    if (up == "PD") return ResponseState::PD;
    return std::nullopt;
}

bool ever_responded(const Trajectory& t) {
    return std::any_of(t.states.begin(), t.states.end(), [](ResponseState s) {
        return s == ResponseState::CR || s == ResponseState::PR;
    });
}

int responder_count(const BasketData& basket) {
    int count = 0;
    for (const auto& p : basket.patients)
        if (ever_responded(p)) ++count;
    return count;
}

double orr_estimate(const BasketData& basket) {
    if (basket.patients.empty())
        throw DataError("orr_estimate: basket '" + basket.basket_id + "' has no patients");
    return static_cast<double>(responder_count(basket)) /
           static_cast<double>(basket.patients.size());
}

} // namespace baskets
