#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "entframe/error.hpp"
#include "entframe/utf8.hpp"

// The fixed narrative-role hierarchy: 3 main roles, 22 fine-grained roles
// partitioned 6/12/4. Canonical spellings are the task's own and comparisons
// against them are exact; a separate lenient lookup (trim + case-fold) exists
// for text coming back from an LLM.

namespace entframe {

enum class MainRole { Protagonist, Antagonist, Innocent };

enum class FineRole {
    // Protagonist
    Guardian,
    Martyr,
    Peacemaker,
    Rebel,
    Underdog,
    Virtuous,
    // Antagonist
    Instigator,
    Conspirator,
    Tyrant,
    ForeignAdversary,
    Traitor,
    Spy,
    Saboteur,
    Corrupt,
    Incompetent,
    Terrorist,
    Deceiver,
    Bigot,
    // Innocent
    Forgotten,
    Exploited,
    Victim,
    Scapegoat,
};

inline constexpr std::array<MainRole, 3> kMainRoles = {
    MainRole::Protagonist, MainRole::Antagonist, MainRole::Innocent};

inline constexpr std::array<FineRole, 22> kFineRoles = {
    FineRole::Guardian,  FineRole::Martyr,    FineRole::Peacemaker,
    FineRole::Rebel,     FineRole::Underdog,  FineRole::Virtuous,
    FineRole::Instigator, FineRole::Conspirator, FineRole::Tyrant,
    FineRole::ForeignAdversary, FineRole::Traitor, FineRole::Spy,
    FineRole::Saboteur,  FineRole::Corrupt,   FineRole::Incompetent,
    FineRole::Terrorist, FineRole::Deceiver,  FineRole::Bigot,
    FineRole::Forgotten, FineRole::Exploited, FineRole::Victim,
    FineRole::Scapegoat};

inline std::string_view to_string(MainRole role) {
    switch (role) {
        case MainRole::Protagonist: return "Protagonist";
        case MainRole::Antagonist: return "Antagonist";
        case MainRole::Innocent: return "Innocent";
    }
    return "";
}

inline std::string_view to_string(FineRole role) {
    switch (role) {
        case FineRole::Guardian: return "Guardian";
        case FineRole::Martyr: return "Martyr";
        case FineRole::Peacemaker: return "Peacemaker";
        case FineRole::Rebel: return "Rebel";
        case FineRole::Underdog: return "Underdog";
        case FineRole::Virtuous: return "Virtuous";
        case FineRole::Instigator: return "Instigator";
        case FineRole::Conspirator: return "Conspirator";
        case FineRole::Tyrant: return "Tyrant";
        case FineRole::ForeignAdversary: return "Foreign Adversary";
        case FineRole::Traitor: return "Traitor";
        case FineRole::Spy: return "Spy";
        case FineRole::Saboteur: return "Saboteur";
        case FineRole::Corrupt: return "Corrupt";
        case FineRole::Incompetent: return "Incompetent";
        case FineRole::Terrorist: return "Terrorist";
        case FineRole::Deceiver: return "Deceiver";
        case FineRole::Bigot: return "Bigot";
        case FineRole::Forgotten: return "Forgotten";
        case FineRole::Exploited: return "Exploited";
        case FineRole::Victim: return "Victim";
        case FineRole::Scapegoat: return "Scapegoat";
    }
    return "";
}

// Fine roles of a main role, in canonical order.
inline const std::vector<FineRole>& fine_roles_of(MainRole main) {
    static const std::vector<FineRole> protagonist = {
        FineRole::Guardian, FineRole::Martyr,   FineRole::Peacemaker,
        FineRole::Rebel,    FineRole::Underdog, FineRole::Virtuous};
    static const std::vector<FineRole> antagonist = {
        FineRole::Instigator, FineRole::Conspirator, FineRole::Tyrant,
        FineRole::ForeignAdversary, FineRole::Traitor, FineRole::Spy,
        FineRole::Saboteur, FineRole::Corrupt, FineRole::Incompetent,
        FineRole::Terrorist, FineRole::Deceiver, FineRole::Bigot};
    static const std::vector<FineRole> innocent = {
        FineRole::Forgotten, FineRole::Exploited, FineRole::Victim,
        FineRole::Scapegoat};
    switch (main) {
        case MainRole::Protagonist: return protagonist;
        case MainRole::Antagonist: return antagonist;
        case MainRole::Innocent: return innocent;
    }
    return protagonist;
}

inline MainRole main_of(FineRole fine) {
    auto idx = static_cast<int>(fine);
    if (idx < 6) return MainRole::Protagonist;
    if (idx < 18) return MainRole::Antagonist;
    return MainRole::Innocent;
}

inline std::optional<MainRole> try_parse_main_role(std::string_view s) {
    for (MainRole m : kMainRoles)
        if (s == to_string(m)) return m;
    return std::nullopt;
}

inline std::optional<FineRole> try_parse_fine_role(std::string_view s) {
    for (FineRole f : kFineRoles)
        if (s == to_string(f)) return f;
    return std::nullopt;
}

using Role = std::variant<MainRole, FineRole>;

// Case-sensitive exact match against canonical names.
inline Role parse_role(std::string_view s) {
    if (auto m = try_parse_main_role(s)) return *m;
    if (auto f = try_parse_fine_role(s)) return *f;
    throw Error(ErrorKind::UnknownRole, "\"" + std::string(s) + "\" is not a role name");
}

// Lenient form used only at the LLM boundary: trim plus ASCII case-fold.
inline std::string normalize_role_string(std::string_view s) {
    std::string t;
    std::size_t b = 0, e = s.size();
    while (b < e && is_ascii_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_ascii_space(static_cast<unsigned char>(s[e - 1]))) --e;
    t.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) {
        char c = s[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        t.push_back(c);
    }
    return t;
}

inline std::optional<MainRole> lenient_parse_main_role(std::string_view s) {
    std::string norm = normalize_role_string(s);
    for (MainRole m : kMainRoles)
        if (norm == normalize_role_string(to_string(m))) return m;
    return std::nullopt;
}

inline std::optional<FineRole> lenient_parse_fine_role(std::string_view s) {
    std::string norm = normalize_role_string(s);
    for (FineRole f : kFineRoles)
        if (norm == normalize_role_string(to_string(f))) return f;
    return std::nullopt;
}

} // namespace entframe
