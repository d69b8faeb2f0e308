#include <doctest.h>

#include <sstream>
#include <string>

#include "baskets/errors.hpp"
#include "baskets/ingest.hpp"
#include "baskets/response.hpp"
#include "baskets/rng.hpp"

using namespace baskets;

namespace {

Trajectory traj(std::string id, std::initializer_list<ResponseState> states) {
    return Trajectory{std::move(id), states};
}

// True when fn throws E and the message mentions `needle`.
template <typename E, typename Fn>
bool throws_mentioning(Fn&& fn, const std::string& needle) {
    try {
        fn();
    } catch (const E& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    } catch (...) {
        return false;
    }
    return false;
}

constexpr auto CR = ResponseState::CR;
constexpr auto PR = ResponseState::PR;
constexpr auto SD = ResponseState::SD;
constexpr auto PD = ResponseState::PD;

} // namespace

TEST_CASE("state names round-trip, case-insensitively") {
    for (auto s : {CR, PR, SD, PD}) {
        CHECK(parse_state(to_string(s)) == s);
    }
    CHECK(parse_state("cr") == CR);
    CHECK(parse_state("Pd") == PD);
    CHECK_FALSE(parse_state("NE").has_value());
    CHECK_FALSE(parse_state("").has_value());
}

TEST_CASE("orr_estimate counts patients that ever reach CR or PR") {
    BasketData b{"B1", {traj("p1", {SD, PR, PR}), traj("p2", {SD, PD})}};
    CHECK(responder_count(b) == 1);
    CHECK(orr_estimate(b) == 0.5);

    BasketData only_cr{"B2", {traj("p1", {CR})}};
    CHECK(orr_estimate(only_cr) == 1.0);

    BasketData none{"B3", {traj("p1", {PD, PD}), traj("p2", {SD, SD})}};
    CHECK(orr_estimate(none) == 0.0);
}

TEST_CASE("orr_estimate equals one minus the never-responder fraction") {
    RngStream rng(2024);
    for (int rep = 0; rep < 1000; ++rep) {
        BasketData b{"B", {}};
        int n = 1 + static_cast<int>(rng.next_u64() % 8);
        int never = 0;
        for (int i = 0; i < n; ++i) {
            Trajectory t{"p" + std::to_string(i), {}};
            int len = 1 + static_cast<int>(rng.next_u64() % 5);
            for (int l = 0; l < len; ++l)
                t.states.push_back(static_cast<ResponseState>(rng.next_u64() % 4));
            if (!ever_responded(t)) ++never;
            b.patients.push_back(std::move(t));
        }
        CHECK(orr_estimate(b) ==
              doctest::Approx(1.0 - static_cast<double>(never) / n).epsilon(1e-15));
    }
}

TEST_CASE("ingest builds trajectories ordered by assessment index") {
    std::istringstream in(
        "basket_id,patient_id,assessment_index,state\n"
        "B1,p1,1,SD\n"
        "B1,p1,2,PR\n");
    auto data = ingest_trial_data(in);
    REQUIRE(data.size() == 1);
    REQUIRE(data[0].patients.size() == 1);
    CHECK(data[0].basket_id == "B1");
    CHECK(data[0].patients[0].states == std::vector<ResponseState>{SD, PR});
}

TEST_CASE("ingest groups rows into baskets in first-appearance order") {
    std::istringstream in(
        "basket_id,patient_id,assessment_index,state\n"
        "B2,p1,1,SD\n"
        "B1,q1,1,CR\n"
        "B2,p2,1,pd\n"
        "B1,q2,1,PR\n");
    auto data = ingest_trial_data(in);
    REQUIRE(data.size() == 2);
    CHECK(data[0].basket_id == "B2");
    CHECK(data[1].basket_id == "B1");
    CHECK(data[0].patients.size() == 2);
    CHECK(data[1].patients.size() == 2);
}

TEST_CASE("ingest accepts permuted columns") {
    std::istringstream in(
        "state,assessment_index,basket_id,patient_id\n"
        "SD,1,B1,p1\n"
        "PR,2,B1,p1\n");
    auto data = ingest_trial_data(in);
    REQUIRE(data.size() == 1);
    CHECK(data[0].patients[0].states == std::vector<ResponseState>{SD, PR});
}

TEST_CASE("ingest rejections carry context") {
    SUBCASE("index gap names the patient") {
        CHECK(throws_mentioning<DataError>([] {
            std::istringstream in(
                "basket_id,patient_id,assessment_index,state\n"
                "B1,p1,1,SD\n"
                "B1,p1,3,PR\n");
            ingest_trial_data(in);
        }, "p1"));
    }
    SUBCASE("duplicate index names the patient") {
        CHECK(throws_mentioning<DataError>([] {
            std::istringstream in(
                "basket_id,patient_id,assessment_index,state\n"
                "B1,p1,1,SD\n"
                "B1,p1,1,PR\n");
            ingest_trial_data(in);
        }, "p1"));
    }
    SUBCASE("unknown state string is rejected") {
        std::istringstream in(
            "basket_id,patient_id,assessment_index,state\n"
            "B1,p1,1,NE\n");
        CHECK_THROWS_AS(ingest_trial_data(in), DataError);
    }
    SUBCASE("missing column is named") {
        CHECK(throws_mentioning<DataError>([] {
            std::istringstream in(
                "basket_id,patient_id,assessment_index\n"
                "B1,p1,1\n");
            ingest_trial_data(in);
        }, "state"));
    }
}

TEST_CASE("ingest round-trips through the canonical serialization") {
    RngStream rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<BasketData> original;
        int n_baskets = 1 + static_cast<int>(rng.next_u64() % 4);
        for (int j = 0; j < n_baskets; ++j) {
            BasketData b{"B" + std::to_string(j + 1), {}};
            int n = 1 + static_cast<int>(rng.next_u64() % 6);
            for (int i = 0; i < n; ++i) {
                Trajectory t{"p" + std::to_string(i + 1), {}};
                int len = 1 + static_cast<int>(rng.next_u64() % 10);
                for (int l = 0; l < len; ++l)
                    t.states.push_back(static_cast<ResponseState>(rng.next_u64() % 4));
                b.patients.push_back(std::move(t));
            }
            original.push_back(std::move(b));
        }
        std::istringstream in(to_csv(original));
        auto back = ingest_trial_data(in);
        REQUIRE(back.size() == original.size());
        for (std::size_t j = 0; j < back.size(); ++j) {
            CHECK(back[j].basket_id == original[j].basket_id);
            REQUIRE(back[j].patients.size() == original[j].patients.size());
            for (std::size_t i = 0; i < back[j].patients.size(); ++i) {
                CHECK(back[j].patients[i].patient_id == original[j].patients[i].patient_id);
                CHECK(back[j].patients[i].states == original[j].patients[i].states);
            }
        }
    }
}
