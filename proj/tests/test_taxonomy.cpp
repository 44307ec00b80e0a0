#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "entframe/taxonomy.hpp"

using namespace entframe;

TEST_CASE("main role inventory is exactly the three framing poles", "[taxonomy]") {
    REQUIRE(kMainRoles.size() == 3);
    CHECK(std::string(to_string(MainRole::Protagonist)) == "Protagonist");
    CHECK(std::string(to_string(MainRole::Antagonist)) == "Antagonist");
    CHECK(std::string(to_string(MainRole::Innocent)) == "Innocent");
}

TEST_CASE("fine role inventory has 22 distinct names in canonical order", "[taxonomy]") {
    REQUIRE(kFineRoles.size() == 22);
    const std::vector<std::string> expected = {
        "Guardian",  "Martyr",     "Peacemaker", "Rebel",      "Underdog",  "Virtuous",
        "Instigator", "Conspirator", "Tyrant",   "Foreign Adversary", "Traitor", "Spy",
        "Saboteur",  "Corrupt",    "Incompetent", "Terrorist", "Deceiver",  "Bigot",
        "Forgotten", "Exploited",  "Victim",     "Scapegoat"};
    std::set<std::string> seen;
    for (std::size_t i = 0; i < kFineRoles.size(); ++i) {
        std::string name(to_string(kFineRoles[i]));
        CHECK(name == expected[i]);
        CHECK(seen.insert(name).second);
        CHECK(static_cast<std::size_t>(kFineRoles[i]) == i);
    }
}

TEST_CASE("fine roles partition into families of 6, 12 and 4", "[taxonomy]") {
    CHECK(fine_roles_of(MainRole::Protagonist).size() == 6);
    CHECK(fine_roles_of(MainRole::Antagonist).size() == 12);
    CHECK(fine_roles_of(MainRole::Innocent).size() == 4);

    std::set<FineRole> all;
    for (MainRole m : kMainRoles)
        for (FineRole f : fine_roles_of(m)) CHECK(all.insert(f).second);
    CHECK(all.size() == 22);
}

TEST_CASE("main_of inverts family membership for every fine role", "[taxonomy]") {
    for (MainRole m : kMainRoles)
        for (FineRole f : fine_roles_of(m)) CHECK(main_of(f) == m);
    // Spot-check the family boundaries by enum value.
    CHECK(main_of(FineRole::Virtuous) == MainRole::Protagonist);
    CHECK(main_of(FineRole::Instigator) == MainRole::Antagonist);
    CHECK(main_of(FineRole::Bigot) == MainRole::Antagonist);
    CHECK(main_of(FineRole::Forgotten) == MainRole::Innocent);
}

TEST_CASE("exact role parsing round-trips and rejects near-misses", "[taxonomy]") {
    for (MainRole m : kMainRoles) {
        auto parsed = try_parse_main_role(std::string(to_string(m)));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == m);
    }
    for (FineRole f : kFineRoles) {
        auto parsed = try_parse_fine_role(std::string(to_string(f)));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == f);
    }
    CHECK_FALSE(try_parse_main_role("protagonist").has_value()); // exact parse is case-sensitive
    CHECK_FALSE(try_parse_main_role("Hero").has_value());
    CHECK_FALSE(try_parse_fine_role("Guardian ").has_value());
    CHECK_FALSE(try_parse_fine_role("ForeignAdversary").has_value());
}

TEST_CASE("lenient parsing folds case and surrounding space only", "[taxonomy]") {
    CHECK(lenient_parse_main_role(" protagonist ") == MainRole::Protagonist);
    CHECK(lenient_parse_main_role("ANTAGONIST") == MainRole::Antagonist);
    CHECK(lenient_parse_fine_role("foreign adversary") == FineRole::ForeignAdversary);
    CHECK(lenient_parse_fine_role("  VICTIM") == FineRole::Victim);
    CHECK_FALSE(lenient_parse_fine_role("foreign-adversary").has_value());
    CHECK_FALSE(lenient_parse_main_role("the protagonist").has_value());
}

TEST_CASE("parse_role distinguishes main from fine names", "[taxonomy]") {
    Role main = parse_role("Antagonist");
    REQUIRE(std::holds_alternative<MainRole>(main));
    CHECK(std::get<MainRole>(main) == MainRole::Antagonist);

    Role fine = parse_role("Scapegoat");
    REQUIRE(std::holds_alternative<FineRole>(fine));
    CHECK(std::get<FineRole>(fine) == FineRole::Scapegoat);

    CHECK_THROWS_AS(parse_role("Bystander"), Error);
}
